use std::io::Write;

use super::five_r::greedy_disjoint;
use crate::error::{invalid, Error, Result};
use crate::space::{Ball, HomogeneousSpace};

/// Whitney cover of a discrete open set `Ω`.
#[derive(Debug, Clone)]
pub struct WhitneyCover {
    pub omega: Vec<bool>,
    pub eta: f64,
    pub balls: Vec<Ball>,
    /// Smallest dilate with `ΛB ∩ Ωᶜ ≠ ∅` for every ball, padded by `1e-9` relative.
    pub lambda: f64,
    /// Largest overlap of the `η`-dilates.
    pub m: usize,
    /// `dist(x, Ωᶜ)` for every point (0 off `Ω`).
    pub dist: Vec<f64>,
}

/// Margin between `η r` and the distance to the complement. With
/// `κη r ≤ dist(c, Ωᶜ)` every point of `ηB` keeps distance `≥ η r`, which is
/// what makes intersecting dilates comparable.
pub fn whitney_margin(space: &HomogeneousSpace) -> f64 {
    2.0 * space.c_d()
}

/// Largest integer `s` with `κη 2^s ≤ d`.
fn whitney_scale(kappa_eta: f64, d: f64) -> i32 {
    let mut s = (d / kappa_eta).log2().floor() as i32;
    while kappa_eta * 2f64.powi(s + 1) <= d {
        s += 1;
    }
    while kappa_eta * 2f64.powi(s) > d {
        s -= 1;
    }
    s
}

pub fn whitney_cover(space: &HomogeneousSpace, omega: &[bool], eta: f64) -> Result<WhitneyCover> {
    if omega.len() != space.len() {
        return Err(Error::InvalidSet(format!("mask has {} entries for {} points", omega.len(), space.len())));
    }
    if !(eta > 5.0) {
        return invalid(format!("Whitney parameter must exceed 5, got {eta}"));
    }
    let inside = omega.iter().filter(|&&b| b).count();
    if inside == 0 {
        return Err(Error::InvalidSet("Ω is empty".into()));
    }
    if inside == space.len() {
        return Err(Error::InvalidSet("Ω is the whole space and has no boundary".into()));
    }
    let dist = space.dist_to_complement(omega);
    let ke = whitney_margin(space) * eta;
    let cands: Vec<(usize, i32, f64)> =
        (0..space.len()).filter(|&x| omega[x]).map(|x| (x, whitney_scale(ke, dist[x]), 0.2)).collect();
    let balls: Vec<Ball> =
        greedy_disjoint(space, cands).into_iter().map(|b| space.ball(b.center(), b.scale())).collect();
    Ok(WhitneyCover::from_balls(space, omega.to_vec(), eta, balls, Some(dist)))
}

impl WhitneyCover {
    /// Wraps an arbitrary ball list, measuring `Λ` and `M`. Used for hand-made
    /// covers as well as constructed ones.
    pub fn from_balls(
        space: &HomogeneousSpace,
        omega: Vec<bool>,
        eta: f64,
        balls: Vec<Ball>,
        dist: Option<Vec<f64>>,
    ) -> Self {
        let dist = dist.unwrap_or_else(|| space.dist_to_complement(&omega));
        let lambda = balls.iter().map(|b| dist[b.center()] / b.radius()).fold(0.0, f64::max) * (1.0 + 1e-9);
        let counts = overlap_counts(space, &balls, eta);
        let m = counts.iter().copied().max().unwrap_or(0);
        Self { omega, eta, balls, lambda, m, dist }
    }

    /// Radius bound for intersecting `η`-dilates implied by the margin.
    pub fn comparability_bound(space: &HomogeneousSpace) -> f64 {
        let c = space.c_d();
        c * (2.0 * whitney_margin(space) + 1.0)
    }

    /// Upper bound on `Λ`: the chosen radius is the largest dyadic one, so
    /// `dist(c, Ωᶜ) < 2κη r`.
    pub fn lambda_bound(&self, space: &HomogeneousSpace) -> f64 {
        2.0 * whitney_margin(space) * self.eta
    }

    /// Cover report rows `ball_id, center, s, M_local, lambda_local`.
    pub fn write_csv<W: Write>(&self, space: &HomogeneousSpace, out: W) -> Result<()> {
        let counts = overlap_counts(space, &self.balls, self.eta);
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["ball_id", "center", "s", "M_local", "lambda_local"])?;
        for (id, b) in self.balls.iter().enumerate() {
            let local = b.members().iter().map(|&x| counts[x]).max().unwrap_or(0);
            w.write_record([
                id.to_string(),
                b.center().to_string(),
                b.scale().to_string(),
                local.to_string(),
                format!("{:.12e}", self.dist[b.center()] / b.radius()),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `Σ_j 1_{a B_j}(x)` for every point.
pub fn overlap_counts(space: &HomogeneousSpace, balls: &[Ball], a: f64) -> Vec<usize> {
    let mut counts = vec![0usize; space.len()];
    for b in balls {
        for j in space.members_within(b.center(), a * b.radius()) {
            counts[j] += 1;
        }
    }
    counts
}

/// Outcome of one property check, with a witness point when it fails.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub pass: bool,
    pub witness: Option<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct WhitneyReport {
    pub properties: Vec<PropertyCheck>,
    pub m: usize,
    pub lambda: f64,
    /// Largest `r_i / r_j` over intersecting `η`-dilates.
    pub comparability: f64,
    /// `max_B #{B' : ηB ∩ ηB' ≠ ∅} / M`.
    pub neighbor_ratio: f64,
}

impl WhitneyReport {
    pub fn all_pass(&self) -> bool {
        self.properties.iter().all(|p| p.pass)
    }

    pub fn failed(&self) -> Vec<&PropertyCheck> {
        self.properties.iter().filter(|p| !p.pass).collect()
    }
}

fn check(name: &'static str, witness: Option<usize>, detail: String) -> PropertyCheck {
    PropertyCheck { name, pass: witness.is_none(), witness, detail }
}

pub fn verify_whitney(space: &HomogeneousSpace, cover: &WhitneyCover) -> WhitneyReport {
    let n = space.len();
    let omega = &cover.omega;
    let balls = &cover.balls;

    // (i) union equals Ω.
    let mut covered = vec![false; n];
    let mut w1 = None;
    for b in balls {
        for &j in b.members() {
            covered[j] = true;
            if !omega[j] && w1.is_none() {
                w1 = Some(j);
            }
        }
    }
    if w1.is_none() {
        w1 = (0..n).find(|&x| omega[x] && !covered[x]);
    }
    let p1 = check("(i) union equals Ω", w1, format!("{} balls", balls.len()));

    // (ii) bounded overlap, with the packing consequence of (iv) and (v):
    // the balls whose η-dilates contain x have disjoint fifths inside one ball around x.
    let mut holders: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (id, b) in balls.iter().enumerate() {
        for j in space.members_within(b.center(), cover.eta * b.radius()) {
            holders[j].push(id as u32);
        }
    }
    let m = holders.iter().map(|h| h.len()).max().unwrap_or(0);
    let fifths: Vec<f64> =
        balls.iter().map(|b| space.measure_of(&space.members_within(b.center(), b.radius() / 5.0))).collect();
    let mut w2 = None;
    let mut worst_packing: f64 = 0.0;
    for x in 0..n {
        let h = &holders[x];
        if h.len() < 2 {
            continue;
        }
        let rmax = h.iter().map(|&i| balls[i as usize].radius()).fold(0.0, f64::max);
        let envelope = space.c_d() * (cover.eta + 1.0) * rmax;
        let room = space.measure_of(&space.members_within(x, envelope));
        let used: f64 = h.iter().map(|&i| fifths[i as usize]).sum();
        worst_packing = worst_packing.max(used / room);
        if used > room * (1.0 + 1e-12) && w2.is_none() {
            w2 = Some(x);
        }
    }
    let p2 = check("(ii) bounded overlap", w2, format!("M = {m}, packing ratio {worst_packing:.3}"));

    // (iii) ηB ⊂ Ω and ΛB meets Ωᶜ.
    let mut w3 = None;
    let mut raw_lambda: f64 = 0.0;
    for b in balls {
        let d = cover.dist[b.center()];
        raw_lambda = raw_lambda.max(d / b.radius());
        if d < cover.eta * b.radius() && w3.is_none() {
            w3 = space.members_within(b.center(), cover.eta * b.radius()).into_iter().find(|&j| !omega[j]);
        }
    }
    let lambda_bound = cover.lambda_bound(space);
    if w3.is_none() && raw_lambda >= lambda_bound {
        w3 = balls.iter().find(|b| cover.dist[b.center()] / b.radius() >= lambda_bound).map(|b| b.center());
    }
    let p3 = check("(iii) ηB ⊂ Ω, ΛB meets Ωᶜ", w3, format!("Λ = {:.4}, bound {lambda_bound}", cover.lambda));

    // (iv) comparable radii for intersecting η-dilates, and the neighbor count.
    let mut comparability: f64 = 1.0;
    let mut w4 = None;
    let bound = WhitneyCover::comparability_bound(space);
    let mut max_neighbors = 0usize;
    let mut seen = vec![u32::MAX; balls.len()];
    for (id, b) in balls.iter().enumerate() {
        let mut count = 0;
        for j in space.members_within(b.center(), cover.eta * b.radius()) {
            for &other in &holders[j] {
                if seen[other as usize] != id as u32 {
                    seen[other as usize] = id as u32;
                    count += 1;
                    let ratio = b.radius() / balls[other as usize].radius();
                    comparability = comparability.max(ratio);
                    if ratio > bound && w4.is_none() {
                        w4 = Some(j);
                    }
                }
            }
        }
        max_neighbors = max_neighbors.max(count);
    }
    let p4 = check("(iv) comparable radii", w4, format!("ratio {comparability}, bound {bound:.3}"));

    // (v) disjoint fifths.
    let mut owner = vec![usize::MAX; n];
    let mut w5 = None;
    'outer: for (id, b) in balls.iter().enumerate() {
        for j in space.members_within(b.center(), b.radius() / 5.0) {
            if owner[j] != usize::MAX {
                w5 = Some(j);
                break 'outer;
            }
            owner[j] = id;
        }
    }
    let p5 = check("(v) disjoint fifths", w5, String::new());

    // (vi) dyadic radii.
    let w6 = balls.iter().find(|b| b.factor() != 1.0).map(|b| b.center());
    let p6 = check("(vi) dyadic radii", w6, String::new());

    WhitneyReport {
        properties: vec![p1, p2, p3, p4, p5, p6],
        m,
        lambda: cover.lambda,
        comparability,
        neighbor_ratio: if m == 0 { 0.0 } else { max_neighbors as f64 / m as f64 },
    }
}

/// Measured constants of the distance estimates for a Whitney cover:
/// `η/b ≤ dist(x,Ωᶜ)/r_L ≤ bΛ` for `x ∈ qL`, and the chain
/// `B(x, dist/Λ) ⊂ D₁L ⊂ D₂B(x, dist/η) ⊂ D₃(Λ/η)L`.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct DistConstants {
    pub b: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub samples: usize,
}

/// Analytic values for a cover built with [`whitney_cover`].
pub fn analytic_dist_constants(c_d: f64, q: f64) -> DistConstants {
    let b = 2.0 * c_d;
    let d1 = c_d * (q + 2.0 * c_d);
    let d2 = 2.0 * c_d * c_d * (q + d1);
    let d3 = c_d * (q + 2.0 * c_d * d2);
    DistConstants { b, d1, d2, d3, samples: 0 }
}

/// Measures the constants on up to `max_balls` balls and `per_ball` points of
/// each `qL`. Each `D` is the smallest dilate realizing its inclusion given the
/// measured previous one.
pub fn measure_dist_constants(
    space: &HomogeneousSpace,
    cover: &WhitneyCover,
    q: f64,
    max_balls: usize,
    per_ball: usize,
) -> DistConstants {
    let mut out = DistConstants { b: 1.0, d1: 1.0, d2: 1.0, d3: 1.0, samples: 0 };
    let stride = (cover.balls.len() / max_balls.max(1)).max(1);
    let far = |c: usize, pts: &[usize]| pts.iter().map(|&y| space.dist(c, y)).fold(0.0, f64::max);
    for l in cover.balls.iter().step_by(stride) {
        let r = l.radius();
        let c = l.center();
        let qpts: Vec<usize> = space.members_within(c, q * r).into_iter().filter(|&x| cover.omega[x]).collect();
        let step = (qpts.len() / per_ball.max(1)).max(1);
        for &x in qpts.iter().step_by(step) {
            let d = cover.dist[x];
            out.b = out.b.max(cover.eta * r / d).max(d / (cover.lambda * r));
            let small = space.members_within(x, d / cover.lambda);
            // Dilates are strict: a point at distance t needs a factor just above t / r.
            let d1 = far(c, &small) / r * (1.0 + 1e-12);
            out.d1 = out.d1.max(d1);
            let big = space.members_within(c, out.d1 * r);
            let d2 = far(x, &big) / (d / cover.eta) * (1.0 + 1e-12);
            out.d2 = out.d2.max(d2);
            let bigger = space.members_within(x, out.d2 * d / cover.eta);
            let d3 = far(c, &bigger) / (cover.lambda * r / cover.eta) * (1.0 + 1e-12);
            out.d3 = out.d3.max(d3);
            out.samples += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_grid_space, GridSpec};

    fn line(e: f64) -> HomogeneousSpace {
        build_grid_space(&GridSpec::new(vec![1.0], 1.0, vec![e])).unwrap()
    }

    #[test]
    fn interior_interval() {
        let s = line(256.0);
        let omega: Vec<bool> = (0..s.len()).map(|i| s.dist(i, s.origin()) < 100.0).collect();
        let cover = whitney_cover(&s, &omega, 6.0).unwrap();
        let report = verify_whitney(&s, &cover);
        assert!(report.all_pass(), "{:?}", report.failed());
        let center_ball = cover.balls.iter().find(|b| b.contains(s.origin())).unwrap();
        let edge = cover.balls.iter().find(|b| b.contains(s.origin() + 99)).unwrap();
        assert!(center_ball.radius() > edge.radius());
    }

    #[test]
    fn two_clusters_stay_apart() {
        let s = line(256.0);
        let o = s.origin();
        let omega: Vec<bool> = (0..s.len()).map(|i| s.dist(i, o - 150) < 60.0 || s.dist(i, o + 150) < 60.0).collect();
        let cover = whitney_cover(&s, &omega, 6.0).unwrap();
        assert!(verify_whitney(&s, &cover).all_pass());
        for b in &cover.balls {
            let left = b.members().iter().any(|&m| m < o);
            let right = b.members().iter().any(|&m| m > o);
            assert!(!(left && right));
        }
    }

    #[test]
    fn isolated_point_is_one_small_ball() {
        let s = line(16.0);
        let mut omega = vec![false; s.len()];
        omega[s.origin()] = true;
        let cover = whitney_cover(&s, &omega, 6.0).unwrap();
        assert_eq!(cover.balls.len(), 1);
        assert_eq!(cover.balls[0].members(), &[s.origin()]);
        assert!(cover.balls[0].radius() <= 1.0 / 12.0);
    }

    #[test]
    fn whole_space_and_empty_rejected() {
        let s = line(8.0);
        assert!(whitney_cover(&s, &vec![true; s.len()], 6.0).is_err());
        assert!(whitney_cover(&s, &vec![false; s.len()], 6.0).is_err());
    }

    #[test]
    fn leaking_ball_fails_iii() {
        let s = line(64.0);
        let o = s.origin();
        let omega: Vec<bool> = (0..s.len()).map(|i| s.dist(i, o) < 20.0).collect();
        let mut cover = whitney_cover(&s, &omega, 6.0).unwrap();
        cover.balls.push(s.ball(o + 15, 1));
        let cover = WhitneyCover::from_balls(&s, omega, 6.0, cover.balls, None);
        let report = verify_whitney(&s, &cover);
        let p3 = &report.properties[2];
        assert!(!p3.pass);
        let w = p3.witness.unwrap();
        assert!(!cover.omega[w]);
    }

    #[test]
    fn overlapping_fifths_fail_v() {
        let s = line(256.0);
        let o = s.origin();
        let omega: Vec<bool> = (0..s.len()).map(|i| s.dist(i, o) < 200.0).collect();
        let balls = vec![s.ball(o, 4), s.ball(o + 1, 4)];
        let cover = WhitneyCover::from_balls(&s, omega, 6.0, balls, None);
        let report = verify_whitney(&s, &cover);
        assert!(!report.properties[4].pass);
        assert!(report.properties[4].witness.is_some());
    }

    #[test]
    fn measured_dist_constants_within_analytic() {
        let s = line(1024.0);
        let omega: Vec<bool> = (0..s.len()).map(|i| s.dist(i, s.origin()) < 700.0).collect();
        let q = 2.0;
        let cover = whitney_cover(&s, &omega, 4.0 * q + 1.0).unwrap();
        let m = measure_dist_constants(&s, &cover, q, 64, 8);
        let a = analytic_dist_constants(s.c_d(), q);
        assert!(m.samples > 0);
        assert!(m.b <= a.b && m.d1 <= a.d1 && m.d2 <= a.d2, "{m:?} vs {a:?}");
    }
}
