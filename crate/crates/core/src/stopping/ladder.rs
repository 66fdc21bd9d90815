use crate::covering::{analytic_dist_constants, measure_dist_constants, whitney_cover, DistConstants};
use crate::error::{invalid, Error, Result};
use crate::function::GridFunction;
use crate::operators::pow2_ceil;
use crate::space::{Ball, HomogeneousSpace};

use super::maximal::{local_maximal_with_dist, maximal_fn};
use super::sparse::{certify_sparse, SparseCollection};

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct StoppingConfig {
    pub p1: f64,
    pub p2: f64,
    /// Localization constant of the operator family.
    pub c_o: f64,
    pub q: f64,
    pub eta: f64,
    /// Initial threshold exponent; doubled on failure up to `theta_cap`.
    pub theta: f64,
    pub theta_cap: f64,
    pub max_depth: usize,
    /// When set, a ladder whose certified `ζ` falls below this also triggers a retune.
    pub zeta_min: Option<f64>,
}

impl StoppingConfig {
    /// Smallest admissible `q` and `η` for the space and `c_o`.
    pub fn new(space: &HomogeneousSpace, c_o: f64, p1: f64, p2: f64) -> Self {
        let cd = space.c_d();
        let q = 10.0 * cd * cd * c_o;
        let b = analytic_dist_constants(cd, q).b;
        Self { p1, p2, c_o, q, eta: 4.0 * cd * cd * b * q, theta: 4.0, theta_cap: 32.0, max_depth: 8, zeta_min: None }
    }

    pub fn validate(&self, space: &HomogeneousSpace) -> Result<()> {
        let cd = space.c_d();
        for (name, p) in [("p1", self.p1), ("p2", self.p2)] {
            if !(p >= 1.0 && p.is_finite()) {
                return invalid(format!("{name} must lie in [1, ∞), got {p}"));
            }
        }
        if !(self.c_o >= 1.0) {
            return invalid(format!("c_o must be at least 1, got {}", self.c_o));
        }
        if self.q < 10.0 * cd * cd * self.c_o {
            return invalid(format!("q = {} is below 10·c_d²·c_o = {}", self.q, 10.0 * cd * cd * self.c_o));
        }
        let b = analytic_dist_constants(cd, self.q).b;
        if self.eta < 4.0 * cd * cd * b * self.q {
            return invalid(format!("η = {} is below 4·c_d²·b·q = {}", self.eta, 4.0 * cd * cd * b * self.q));
        }
        if !(self.theta >= 1.0) || self.theta_cap < self.theta {
            return invalid(format!("need 1 ≤ Θ ≤ Θ cap, got {} and {}", self.theta, self.theta_cap));
        }
        if let Some(z) = self.zeta_min {
            if !(z > 0.0 && z < 1.0) {
                return invalid(format!("ζ floor must lie in (0, 1), got {z}"));
            }
        }
        Ok(())
    }
}

/// One rung: the set `E_k` and its cover `B_k`.
#[derive(Debug, Clone)]
pub struct Level {
    pub set: Vec<bool>,
    pub measure: f64,
    pub balls: Vec<Ball>,
    /// Whitney `Λ` of the cover (0 on level 0 and on empty levels).
    pub lambda: f64,
    /// `dist(x, E_kᶜ)`.
    pub dist: Vec<f64>,
}

impl Level {
    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct HalvingReport {
    /// `max_k |E_{k+1}| / |E_k|`.
    pub measure_ratio: f64,
    /// `max r_B / r_L` over `B ∈ B_{k+1}`, `L ∈ B_k` with `c_oL ∩ B ≠ ∅`.
    pub radius_ratio: f64,
}

impl HalvingReport {
    pub fn pass(&self) -> bool {
        self.measure_ratio <= 0.5 && self.radius_ratio <= 0.5
    }
}

#[derive(Debug, Clone)]
pub struct StoppingLadder {
    pub config: StoppingConfig,
    pub b0: Ball,
    /// Levels `0..=K+1`; level 0 is `E_0 = c_oB_0` with `B_0 = {c_oB_0}`, and
    /// level `K+1` is empty unless the depth cap was hit.
    pub levels: Vec<Level>,
    /// Final threshold exponent after auto-tuning.
    pub theta: f64,
    pub retunes: usize,
    pub halving: HalvingReport,
    /// Measured `b, D₁, D₂, D₃` (maxima over levels).
    pub dist_constants: DistConstants,
    pub c1: f64,
    pub collection: Option<SparseCollection>,
}

impl StoppingLadder {
    /// Number of nonempty levels beyond the top one.
    pub fn depth(&self) -> usize {
        self.levels.len() - 2
    }

    /// True when the depth cap stopped the construction with `E_{K+1} ≠ ∅`.
    pub fn has_remainder(&self) -> bool {
        !self.levels.last().is_some_and(Level::is_empty)
    }

    pub fn nested(&self) -> bool {
        self.levels.windows(2).all(|w| w[1].set.iter().zip(&w[0].set).all(|(&a, &b)| !a || b))
    }
}

fn mask_of(n: usize, members: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &j in members {
        m[j] = true;
    }
    m
}

fn empty_level(n: usize) -> Level {
    Level { set: vec![false; n], measure: 0.0, balls: Vec::new(), lambda: 0.0, dist: vec![0.0; n] }
}

enum Attempt {
    Built(Box<StoppingLadder>),
    Retune(String),
}

/// Stopping-time construction for `(|f1|, |f2|)` below `B0`, with `Θ` doubled
/// whenever measure halving, radius halving or (if requested) the `ζ` floor fails.
pub fn build_stopping_ladder(
    space: &HomogeneousSpace,
    f1: &GridFunction,
    f2: &GridFunction,
    b0: &Ball,
    config: &StoppingConfig,
) -> Result<StoppingLadder> {
    config.validate(space)?;
    let n = space.len();
    if f1.len() != n || f2.len() != n {
        return invalid(format!("functions have {} and {} values for {} points", f1.len(), f2.len(), n));
    }
    if !f1.is_finite() || !f2.is_finite() {
        return Err(Error::NonFinite("stopping inputs".into()));
    }
    let top = b0.dilate(space, config.c_o);
    let e0 = mask_of(n, top.members());
    for (name, f) in [("f1", f1), ("f2", f2)] {
        if let Some(x) = f.support().into_iter().find(|&x| !e0[x]) {
            return invalid(format!("{name} is nonzero at point {x} outside c_oB0"));
        }
    }
    let mut theta = config.theta;
    let mut retunes = 0;
    loop {
        match attempt(space, f1, f2, b0, &top, &e0, config, theta)? {
            Attempt::Built(mut ladder) => {
                ladder.retunes = retunes;
                return Ok(*ladder);
            }
            Attempt::Retune(why) => {
                if theta * 2.0 > config.theta_cap {
                    return Err(Error::NoConvergence(format!(
                        "Θ = {theta} reached the cap {}: {why}",
                        config.theta_cap
                    )));
                }
                theta *= 2.0;
                retunes += 1;
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn attempt(
    space: &HomogeneousSpace,
    f1: &GridFunction,
    f2: &GridFunction,
    b0: &Ball,
    top: &Ball,
    e0: &[bool],
    config: &StoppingConfig,
    theta: f64,
) -> Result<Attempt> {
    let n = space.len();
    let gain = theta.exp2();
    let pairs = [(f1, config.p1), (f2, config.p2)];
    let d2 = analytic_dist_constants(space.c_d(), config.q).d2;

    let mut levels = vec![Level {
        set: e0.to_vec(),
        measure: top.measure(),
        balls: vec![top.clone()],
        lambda: 0.0,
        dist: space.dist_to_complement(e0),
    }];

    // E_1 from the global maximal functions against the averages over c_oB_0.
    let mut next = vec![false; n];
    for (f, p) in pairs {
        let thr = gain * f.avg_p(space, p, top.members());
        for (x, m) in maximal_fn(space, f, p).into_iter().enumerate() {
            if e0[x] && m > thr {
                next[x] = true;
            }
        }
    }

    let mut measured = DistConstants { b: 1.0, d1: 1.0, d2: 1.0, d3: 1.0, samples: 0 };
    loop {
        let prev = levels.last().unwrap();
        let measure = space.measure_of(&(0..n).filter(|&x| next[x]).collect::<Vec<_>>());
        if measure > prev.measure / 2.0 {
            return Ok(Attempt::Retune(format!(
                "|E_{}| = {measure} exceeds half of |E_{}| = {}",
                levels.len(),
                levels.len() - 1,
                prev.measure
            )));
        }
        if measure == 0.0 {
            levels.push(empty_level(n));
            break;
        }
        let cover = whitney_cover(space, &next, config.eta)?;
        let m = measure_dist_constants(space, &cover, config.q, 16, 4);
        measured.b = measured.b.max(m.b);
        measured.d1 = measured.d1.max(m.d1);
        measured.d2 = measured.d2.max(m.d2);
        measured.d3 = measured.d3.max(m.d3);
        measured.samples += m.samples;
        let level = Level { set: next, measure, balls: cover.balls, lambda: cover.lambda, dist: cover.dist };
        levels.push(level);
        if levels.len() > config.max_depth + 1 {
            break;
        }

        // E_{k+1} ⊂ E_k from the local maximal functions against moving averages.
        let cur = levels.last().unwrap();
        let delta = 2.0 * space.c_d() * cur.lambda;
        let mut out = vec![false; n];
        for (f, p) in pairs {
            let local = local_maximal_with_dist(space, f, p, &cur.set, &cur.dist, delta);
            for x in 0..n {
                if !cur.set[x] || out[x] || local[x] == 0.0 {
                    continue;
                }
                let near = space.members_within(x, d2 * cur.dist[x] / config.eta);
                if local[x] > gain * f.avg_p(space, p, &near) {
                    out[x] = true;
                }
            }
        }
        next = out;
    }

    let halving = halving_report(space, &levels, config.c_o);
    if halving.radius_ratio > 0.5 {
        return Ok(Attempt::Retune(format!("radius ratio {} exceeds 1/2", halving.radius_ratio)));
    }
    let lambda = levels.iter().map(|l| l.lambda).fold(0.0, f64::max);
    let c1 = if measured.samples > 0 { pow2_ceil(lambda * measured.d3 / config.eta) } else { 1.0 };
    let mut ladder = StoppingLadder {
        config: config.clone(),
        b0: b0.clone(),
        levels,
        theta,
        retunes: 0,
        halving,
        dist_constants: measured,
        c1,
        collection: None,
    };
    if let Some(floor) = config.zeta_min {
        match certify_sparse(space, &ladder) {
            Ok(c) if c.zeta >= floor => ladder.collection = Some(c),
            Ok(c) => return Ok(Attempt::Retune(format!("ζ = {} below the floor {floor}", c.zeta))),
            Err(e @ Error::EmptyMajorSubset { .. }) => return Ok(Attempt::Retune(e.to_string())),
            Err(e) => return Err(e),
        }
    }
    Ok(Attempt::Built(Box::new(ladder)))
}

fn halving_report(space: &HomogeneousSpace, levels: &[Level], c_o: f64) -> HalvingReport {
    let n = space.len();
    let mut measure_ratio: f64 = 0.0;
    let mut radius_ratio: f64 = 0.0;
    for w in levels.windows(2) {
        let (upper, lower) = (&w[0], &w[1]);
        measure_ratio = measure_ratio.max(lower.measure / upper.measure);
        if lower.balls.is_empty() {
            continue;
        }
        // Smallest radius among the L whose c_oL reaches each point.
        let mut smallest = vec![f64::INFINITY; n];
        for l in &upper.balls {
            let r = l.radius();
            for x in space.members_within(l.center(), c_o * r) {
                smallest[x] = smallest[x].min(r);
            }
        }
        for b in &lower.balls {
            let r_l = b.members().iter().map(|&x| smallest[x]).fold(f64::INFINITY, f64::min);
            if r_l.is_finite() {
                radius_ratio = radius_ratio.max(b.radius() / r_l);
            }
        }
    }
    HalvingReport { measure_ratio, radius_ratio }
}

/// Recorded constants of the pointwise bound (iv) and the level-crossing bound (v).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LadderConstants {
    pub pointwise: f64,
    pub crossing: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

/// Largest `|f_i(x)| / ⟨f_i⟩_{p_i,c_1B}` over `x ∈ E_k∖E_{k+1}`, `B ∈ B_k` with
/// `qB ∋ x`, and largest `⟨f_i⟩_{p_i,qB} / ⟨f_i⟩_{p_i,c_1L}` over `B ∈ B_{k+1}`,
/// `L ∈ B_k` with `c_oL ∩ B ≠ ∅`.
pub fn ladder_constants(
    space: &HomogeneousSpace,
    ladder: &StoppingLadder,
    f1: &GridFunction,
    f2: &GridFunction,
) -> LadderConstants {
    let cfg = &ladder.config;
    let pairs = [(f1, cfg.p1), (f2, cfg.p2)];
    let mut out = LadderConstants { pointwise: 0.0, crossing: 0.0 };
    for k in 0..ladder.levels.len() - 1 {
        let (cur, below) = (&ladder.levels[k], &ladder.levels[k + 1]);
        let wide: Vec<[f64; 2]> = cur
            .balls
            .iter()
            .map(|l| {
                let pts = space.members_within(l.center(), ladder.c1 * l.radius());
                [f1.avg_p(space, cfg.p1, &pts), f2.avg_p(space, cfg.p2, &pts)]
            })
            .collect();
        for (l, avgs) in cur.balls.iter().zip(&wide) {
            for x in space.members_within(l.center(), cfg.q * l.radius()) {
                if cur.set[x] && !below.set[x] {
                    for (i, (f, _)) in pairs.iter().enumerate() {
                        out.pointwise = out.pointwise.max(ratio(f.get(x).norm(), avgs[i]));
                    }
                }
            }
        }
        if below.balls.is_empty() {
            continue;
        }
        let mut reach: Vec<Vec<u32>> = vec![Vec::new(); space.len()];
        for (id, l) in cur.balls.iter().enumerate() {
            for x in space.members_within(l.center(), cfg.c_o * l.radius()) {
                reach[x].push(id as u32);
            }
        }
        for b in &below.balls {
            let mut ls: Vec<u32> = b.members().iter().flat_map(|&x| reach[x].iter().copied()).collect();
            ls.sort_unstable();
            ls.dedup();
            let pts = space.members_within(b.center(), cfg.q * b.radius());
            for (i, (f, p)) in pairs.iter().enumerate() {
                let num = f.avg_p(space, *p, &pts);
                for &l in &ls {
                    out.crossing = out.crossing.max(ratio(num, wide[l as usize][i]));
                }
            }
        }
    }
    out
}
