use num_complex::Complex64;
use rand::Rng as _;

use super::atom::make_atom;
use crate::error::{invalid, Result};
use crate::function::GridFunction;
use crate::operators::{random_on, SingleScaleFamily};
use crate::seeding;
use crate::space::{Ball, GridMeta, HomogeneousSpace};
use crate::stats::{fit_line, LinearFit};

/// `p′` with `1′ = ∞`.
pub fn dual_exponent(p: f64) -> f64 {
    if p <= 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Sampling parameters shared by the improving checks.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ImprovingConfig {
    /// Balls `L` have `2^s ≤ r_L ≤ γ₁2^s`.
    pub gamma1: f64,
    /// Averages of the output are taken over `γ₂L`.
    pub gamma2: f64,
    pub trials: usize,
    pub seed: u64,
}

impl ImprovingConfig {
    pub fn for_family(family: &dyn SingleScaleFamily, trials: usize, seed: u64) -> Self {
        Self { gamma1: 2.0, gamma2: family.c_o().max(2.0), trials, seed }
    }
}

/// Random ball with `2^s ≤ r_L ≤ γ₁2^s`, preferring centers whose `γ₂L` stays
/// inside the extent.
pub(crate) fn random_host(space: &HomogeneousSpace, s: i32, cfg: &ImprovingConfig, rng: &mut seeding::Rng) -> Ball {
    let top = s + cfg.gamma1.log2().floor() as i32;
    let s_l = rng.random_range(s..=top.max(s));
    let reach = cfg.gamma2 * 2f64.powi(s_l);
    for _ in 0..32 {
        let c = rng.random_range(0..space.len());
        if !space.escapes_extent(c, reach) {
            return space.ball(c, s_l);
        }
    }
    space.ball(space.origin(), s_l)
}

/// Test function on `L`, cycling through uniform noise, random signs, a sub-ball
/// indicator and the indicator of `L`.
pub(crate) fn test_function(space: &HomogeneousSpace, l: &Ball, kind: usize, rng: &mut seeding::Rng) -> GridFunction {
    match kind % 4 {
        0 => random_on(space, l.members(), rng),
        1 => {
            let mut f = GridFunction::zeros(space.len());
            for &i in l.members() {
                f.set(i, Complex64::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0));
            }
            f
        }
        2 => {
            let c = l.members()[rng.random_range(0..l.len())];
            let s = rng.random_range(space.singleton_scale().min(l.scale() - 1)..l.scale());
            let sub: Vec<usize> = space.ball(c, s).members().iter().copied().filter(|&x| l.contains(x)).collect();
            GridFunction::indicator(space.len(), &sub)
        }
        _ => GridFunction::indicator(space.len(), l.members()),
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ImprovingA {
    pub s: i32,
    pub i_emp: f64,
    pub trials_used: usize,
}

/// Largest observed `⟨T(s)(f1_L)⟩_{p₂′,γ₂L} / ⟨f⟩_{p₁,L}`.
pub fn check_improving_a(
    family: &dyn SingleScaleFamily,
    s: i32,
    p1: f64,
    p2: f64,
    cfg: &ImprovingConfig,
) -> Result<ImprovingA> {
    if !family.scales().contains(&s) {
        return invalid(format!("scale {s} is outside the family range {:?}", family.scales()));
    }
    let space = family.space().clone();
    let q = dual_exponent(p2);
    let mut rng = seeding::stream(cfg.seed, 0x1a);
    let mut best: f64 = 0.0;
    let mut used = 0;
    for t in 0..cfg.trials {
        let l = random_host(&space, s, cfg, &mut rng);
        let f = test_function(&space, &l, t, &mut rng);
        let size = f.avg_p(&space, p1, l.members());
        if size == 0.0 {
            continue;
        }
        let out = family.apply(s, &f);
        let wide = space.members_within(l.center(), cfg.gamma2 * l.radius());
        best = best.max(out.avg_p(&space, q, &wide) / size);
        used += 1;
    }
    Ok(ImprovingA { s, i_emp: best, trials_used: used })
}

/// Empirical modulus table with its nondecreasing envelope and power fit.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ModulusTable {
    /// `(t, raw maximum, envelope)` in increasing `t`.
    pub rows: Vec<(f64, f64, f64)>,
    pub fit: Option<LinearFit>,
}

impl ModulusTable {
    fn from_raw(mut raw: Vec<(f64, f64)>) -> Self {
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut env: f64 = 0.0;
        let rows: Vec<(f64, f64, f64)> = raw
            .into_iter()
            .map(|(t, v)| {
                env = env.max(v);
                (t, v, env)
            })
            .collect();
        let (x, y): (Vec<f64>, Vec<f64>) =
            rows.iter().filter(|r| r.2 > 0.0).map(|&(t, _, e)| (t.log2(), e.log2())).unzip();
        Self { rows, fit: fit_line(&x, &y) }
    }

    /// Fitted exponent `ε` in `ω(t) ≈ C t^ε`.
    pub fn exponent(&self) -> Option<f64> {
        self.fit.map(|f| f.slope)
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "omega_raw", "omega_env"])?;
        for (t, v, e) in &self.rows {
            w.write_record([format!("{t:.12e}"), format!("{v:.12e}"), format!("{e:.12e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `ω_emp(r/2^s)`: largest `|⟨T(s)(f1_L), b⟩| / (|L|⟨f⟩_{p₁,L}⟨b⟩_{p₂,γ₂L})`
/// over atoms `b` of radius `r = 2^{s_b}`, one row per entry of `atom_scales`.
/// Each trial pairs one random atom and one two-point atom on the same ball.
pub fn check_improving_b(
    family: &dyn SingleScaleFamily,
    s: i32,
    p1: f64,
    p2: f64,
    atom_scales: &[i32],
    cfg: &ImprovingConfig,
) -> Result<ModulusTable> {
    if let Some(&bad) = atom_scales.iter().find(|&&sb| sb > s) {
        return invalid(format!("atom scale {bad} exceeds the operator scale {s}"));
    }
    if !family.scales().contains(&s) {
        return invalid(format!("scale {s} is outside the family range {:?}", family.scales()));
    }
    let space = family.space().clone();
    let mut raw = Vec::new();
    for (row, &sb) in atom_scales.iter().enumerate() {
        let mut rng = seeding::stream(cfg.seed, 0x1b00 + row as u64);
        let mut best: f64 = 0.0;
        for t in 0..cfg.trials {
            let l = random_host(&space, s, cfg, &mut rng);
            let f = test_function(&space, &l, t, &mut rng);
            let size = f.avg_p(&space, p1, l.members());
            if size == 0.0 {
                continue;
            }
            let wide = space.members_within(l.center(), cfg.gamma2 * l.radius());
            let c = wide[rng.random_range(0..wide.len())];
            let ball = space.ball(c, sb);
            if ball.len() < 2 {
                continue;
            }
            let out = family.apply(s, &f);
            let normalized = |b: &GridFunction| {
                let pairing = out.inner(&space, b).norm();
                pairing / (l.measure() * size * b.avg_p(&space, p2, &wide))
            };
            let atom = make_atom(&space, &ball, p2, rng.random())?;
            best = best.max(normalized(&atom.values));
            // Adversarial atom: two points of B where T(s)f differs the most.
            let two = two_point_atom(&space, &out, &ball);
            best = best.max(normalized(&two));
        }
        raw.push((2f64.powi(sb - s), best));
    }
    Ok(ModulusTable::from_raw(raw))
}

/// `δ_x/μ_x − δ_y/μ_y` with `x, y ∈ B` chosen greedily to make `|u(x) − u(y)|`
/// large (within a factor 2 of the best pair). For `p = 1` this is the extremal
/// atom for the pairing with `u`.
fn two_point_atom(space: &HomogeneousSpace, u: &GridFunction, ball: &Ball) -> GridFunction {
    let far = |from: usize| {
        ball.members()
            .iter()
            .copied()
            .max_by(|&a, &b| (u.get(a) - u.get(from)).norm().total_cmp(&(u.get(b) - u.get(from)).norm()))
            .unwrap()
    };
    let x = far(ball.center());
    let mut y = far(x);
    if y == x {
        y = *ball.members().iter().find(|&&m| m != x).unwrap();
    }
    let mut b = GridFunction::zeros(space.len());
    b.set(x, Complex64::new(1.0 / space.weight(x), 0.0));
    b.set(y, Complex64::new(-1.0 / space.weight(y), 0.0));
    b
}

/// `g(· − y)` for a lattice offset `y`; `None` when part of the support would
/// leave the extent.
pub fn translate(grid: &GridMeta, f: &GridFunction, offset: &[i64]) -> Option<GridFunction> {
    let mut out = GridFunction::zeros(f.len());
    for x in f.support() {
        let k: Vec<i64> = grid.coords(x).iter().zip(offset).map(|(a, b)| a + b).collect();
        let j = grid.index(&k)?;
        out.set(j, f.get(x));
    }
    Some(out)
}

/// Envelope of `⟨[T(s) − Tr_y T(s)](f1_L)⟩_{p₂′,c_oL} / ⟨f⟩_{p₁,L}` against
/// `ρ(δ_{2^{-s}} y) = ρ(y)/2^s`, for axis translations of sizes `2^{s-j}`,
/// `j = 0..levels`.
pub fn continuity_fit(
    family: &dyn SingleScaleFamily,
    s: i32,
    p1: f64,
    p2: f64,
    levels: usize,
    cfg: &ImprovingConfig,
) -> Result<ModulusTable> {
    let space = family.space().clone();
    let Some(grid) = space.grid() else {
        return invalid("translations need a grid space");
    };
    let q = dual_exponent(p2);
    let c_o = family.c_o();
    let mut raw = Vec::new();
    for j in 0..levels {
        let target = 2f64.powi(s - j as i32);
        let mut rng = seeding::stream(cfg.seed, 0x1c00 + j as u64);
        let mut best: f64 = 0.0;
        let mut t_row = None;
        for t in 0..cfg.trials {
            // Along one axis ρ(h m e_a) = (h m)^{1/α_a}.
            let a = rng.random_range(0..grid.dim());
            let alpha = grid.dilations.exponents()[a];
            let m = ((target / 2.0).powf(alpha) / grid.step).ceil().max(1.0) as i64;
            let mut y = vec![0i64; grid.dim()];
            y[a] = if rng.random::<bool>() { m } else { -m };
            let rho_y = grid.offset_rho(&y);
            if rho_y >= target * 2.0 {
                continue;
            }
            let l = random_host(&space, s, cfg, &mut rng);
            let f = test_function(&space, &l, t, &mut rng);
            let size = f.avg_p(&space, p1, l.members());
            if size == 0.0 {
                continue;
            }
            let out = family.apply(s, &f);
            let Some(moved) = translate(grid, &out, &y) else {
                continue;
            };
            let wide = space.members_within(l.center(), c_o * l.radius());
            best = best.max(out.sub(&moved).avg_p(&space, q, &wide) / size);
            t_row = Some(rho_y / 2f64.powi(s));
        }
        if let Some(tv) = t_row {
            raw.push((tv, best));
        }
    }
    Ok(ModulusTable::from_raw(raw))
}
