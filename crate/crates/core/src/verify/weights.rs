use rand::Rng as _;

use crate::error::{invalid, Result};
use crate::function::GridFunction;
use crate::improving::dual_exponent;
use crate::operators::{random_on, truncate, SingleScaleFamily};
use crate::seeding;
use crate::space::HomogeneousSpace;
use crate::stopping::distinct_scales;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct WeightRecord {
    pub p: f64,
    pub q: f64,
    /// `[w]_{A_p}` over all dyadic balls centered at points.
    pub a_p: f64,
    /// `[w]_{RH_q}` over the same balls.
    pub rh_q: f64,
}

fn positive(space: &HomogeneousSpace, w: &[f64]) -> Result<()> {
    if w.len() != space.len() {
        return invalid(format!("weight has {} values for {} points", w.len(), space.len()));
    }
    if let Some(x) = w.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
        return invalid(format!("weight is not positive and finite at point {x}"));
    }
    Ok(())
}

/// `[w]_{A_p} = sup_B ⟨w⟩_B ⟨w^{−1/(p−1)}⟩_B^{p−1}` (`⟨w⟩_B / inf_B w` for `p = 1`)
/// and `[w]_{RH_q} = sup_B ⟨w⟩_{q,B} / ⟨w⟩_{1,B}`. Singleton balls give 1, so
/// both constants are at least 1.
pub fn weight_constants(space: &HomogeneousSpace, w: &[f64], p: f64, q: f64) -> Result<WeightRecord> {
    positive(space, w)?;
    if !(p >= 1.0) || !(q > 1.0) || q.is_infinite() {
        return invalid(format!("need p ≥ 1 and 1 < q < ∞, got {p} and {q}"));
    }
    let mu = space.weights();
    let wm: Vec<f64> = w.iter().zip(mu).map(|(a, m)| a * m).collect();
    let wq: Vec<f64> = w.iter().zip(mu).map(|(a, m)| a.powf(q) * m).collect();
    let dual: Vec<f64> = if p > 1.0 {
        w.iter().zip(mu).map(|(a, m)| a.powf(-1.0 / (p - 1.0)) * m).collect()
    } else {
        w.iter().map(|a| 1.0 / a).collect()
    };
    let (mut a_p, mut rh_q) = (1.0f64, 1.0f64);
    for s in distinct_scales(space) {
        let r = 2f64.powi(s);
        let vol = space.ball_sums(r, mu);
        let avg_w = space.ball_sums(r, &wm);
        let avg_q = space.ball_sums(r, &wq);
        let other = if p > 1.0 { space.ball_sums(r, &dual) } else { space.ball_max(r, &dual) };
        for c in 0..space.len() {
            let aw = avg_w[c] / vol[c];
            let a = if p > 1.0 { aw * (other[c] / vol[c]).powf(p - 1.0) } else { aw * other[c] };
            a_p = a_p.max(a);
            rh_q = rh_q.max((avg_q[c] / vol[c]).powf(1.0 / q) / aw);
        }
    }
    Ok(WeightRecord { p, q, a_p, rh_q })
}

/// Exponent `max(1/(p−p₁), (p₂′−1)/(p₂′−p))` of the weighted bound, for `p₁ < p < p₂′`.
pub fn weighted_exponent(p: f64, p1: f64, p2: f64) -> Result<f64> {
    let q = dual_exponent(p2);
    if !(p1 < p && p < q) {
        return invalid(format!("need p1 < p < p2′, got {p1} < {p} < {q}"));
    }
    let second = if q.is_infinite() { 1.0 } else { (q - 1.0) / (q - p) };
    Ok((1.0 / (p - p1)).max(second))
}

/// `([w]_{A_{p/p₁}} [w]_{RH_{(p₂′/p)′}})^{exponent}`.
pub fn weighted_bound(space: &HomogeneousSpace, w: &[f64], p: f64, p1: f64, p2: f64) -> Result<f64> {
    let e = weighted_exponent(p, p1, p2)?;
    let q2 = dual_exponent(p2);
    let a = weight_constants(space, w, p / p1, 2.0)?.a_p;
    let rh = if q2.is_infinite() { 1.0 } else { weight_constants(space, w, 2.0, dual_exponent(q2 / p))?.rh_q };
    Ok((a * rh).powf(e))
}

fn weighted_norm(space: &HomogeneousSpace, f: &GridFunction, w: &[f64], p: f64) -> f64 {
    let s: f64 = f.values().iter().zip(w).zip(space.weights()).map(|((v, a), m)| v.norm().powf(p) * a * m).sum();
    s.powf(1.0 / p)
}

/// Largest `‖T_σ^τ f‖_{L^p(w)} / ‖f‖_{L^p(w)}` over random `f` on random balls.
#[allow(clippy::too_many_arguments)]
pub fn weighted_norm_sample(
    family: &dyn SingleScaleFamily,
    sigma: i32,
    tau: i32,
    w: &[f64],
    p: f64,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let space = family.space().clone();
    positive(&space, w)?;
    let mut rng = seeding::stream(seed, 0x3e);
    let mut best: f64 = 0.0;
    for _ in 0..trials {
        let c = rng.random_range(0..space.len());
        let s = rng.random_range(sigma..=tau);
        let f = random_on(&space, space.ball(c, s).members(), &mut rng);
        let base = weighted_norm(&space, &f, w, p);
        if base > 0.0 {
            best = best.max(weighted_norm(&space, &truncate(family, sigma, tau, &f), w, p) / base);
        }
    }
    Ok(best)
}
