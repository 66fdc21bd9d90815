use crate::function::GridFunction;
use crate::space::HomogeneousSpace;

/// Dyadic scales whose balls differ: for each scale above the singleton one,
/// kept only when `B(0, 2^s)` differs in size from the previous kept scale.
/// Identical ball sets at a larger radius add nothing to a supremum.
pub(crate) fn distinct_scales(space: &HomogeneousSpace) -> Vec<i32> {
    let lo = space.singleton_scale() + 1;
    let hi = space.top_scale();
    let o = space.origin();
    let mut out = Vec::new();
    let mut last = 1usize;
    for s in lo..=hi {
        let count = space.members_within(o, 2f64.powi(s)).len();
        if count != last {
            out.push(s);
            last = count;
        }
    }
    out
}

/// `⟨f⟩_{p, B(c, r)}` for every center `c`, given `|f|^p μ`.
fn center_averages(space: &HomogeneousSpace, r: f64, fp_w: &[f64], p: f64) -> Vec<f64> {
    let num = space.ball_sums(r, fp_w);
    let den = space.ball_sums(r, space.weights());
    num.iter().zip(&den).map(|(a, b)| (a.max(0.0) / b).powf(1.0 / p)).collect()
}

fn weighted_power(space: &HomogeneousSpace, f: &GridFunction, p: f64) -> Vec<f64> {
    f.values().iter().zip(space.weights()).map(|(v, w)| v.norm().powf(p) * w).collect()
}

/// `M_p f(x) = sup_{B ∋ x} ⟨f⟩_{p,B}` over balls centered at points with
/// dyadic radii, singletons included.
pub fn maximal_fn(space: &HomogeneousSpace, f: &GridFunction, p: f64) -> Vec<f64> {
    let mut out = f.abs();
    let fp = weighted_power(space, f, p);
    for s in distinct_scales(space) {
        let r = 2f64.powi(s);
        let avg = center_averages(space, r, &fp, p);
        for (o, v) in out.iter_mut().zip(space.ball_max(r, &avg)) {
            *o = o.max(v);
        }
    }
    out
}

/// `M_p^{Ω,Δ} f(x) = sup ⟨f⟩_{p,B}` over balls `B ∋ x` with
/// `dist(B, Ωᶜ) ≥ Δ r_B`, for `x ∈ Ω`; zero elsewhere. Singleton balls of
/// small enough radius always qualify, so the value at `x ∈ Ω` is at least `|f(x)|`.
pub fn local_maximal_fn(space: &HomogeneousSpace, f: &GridFunction, p: f64, omega: &[bool], delta: f64) -> Vec<f64> {
    let dist = space.dist_to_complement(omega);
    local_maximal_with_dist(space, f, p, omega, &dist, delta)
}

pub(crate) fn local_maximal_with_dist(
    space: &HomogeneousSpace,
    f: &GridFunction,
    p: f64,
    omega: &[bool],
    dist: &[f64],
    delta: f64,
) -> Vec<f64> {
    let n = space.len();
    let mut out: Vec<f64> = (0..n).map(|x| if omega[x] { f.get(x).norm() } else { 0.0 }).collect();
    let fp = weighted_power(space, f, p);
    let neg: Vec<f64> = dist.iter().map(|d| -d).collect();
    for s in distinct_scales(space) {
        let r = 2f64.powi(s);
        // dist(B(c,r), Ωᶜ) = min over members of dist(·, Ωᶜ).
        let closest = space.ball_max(r, &neg);
        let qualifies: Vec<bool> = closest.iter().map(|&m| -m >= delta * r).collect();
        if !qualifies.iter().any(|&q| q) {
            // Larger balls sit even closer to the complement.
            break;
        }
        let avg = center_averages(space, r, &fp, p);
        let masked: Vec<f64> = avg.iter().zip(&qualifies).map(|(&a, &q)| if q { a } else { 0.0 }).collect();
        for (x, v) in space.ball_max(r, &masked).into_iter().enumerate() {
            if omega[x] {
                out[x] = out[x].max(v);
            }
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
    fn constant_is_fixed() {
        let s = line(64.0);
        let m = maximal_fn(&s, &GridFunction::constant(s.len(), 1.0), 1.5);
        assert!(m.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn point_mass_profile() {
        let s = line(64.0);
        let o = s.origin();
        let m = maximal_fn(&s, &GridFunction::indicator(s.len(), &[o]), 1.0);
        assert_eq!(m[o], 1.0);
        // Brute force over every ball B(c, 2^s) containing x and the origin.
        for x in [o + 1, o + 3, o + 10, o + 40] {
            let mut best: f64 = 0.0;
            for sc in 0..8 {
                for c in 0..s.len() {
                    let b = s.ball(c, sc);
                    if b.contains(x) && b.contains(o) {
                        best = best.max(1.0 / b.len() as f64);
                    }
                }
            }
            assert!((m[x] - best).abs() < 1e-12, "{} vs {}", m[x], best);
        }
    }

    #[test]
    fn dominates_absolute_value() {
        let s = line(32.0);
        let f = GridFunction::from_real((0..s.len()).map(|i| ((i * 7) % 5) as f64 - 2.0).collect());
        let m = maximal_fn(&s, &f, 2.0);
        assert!(m.iter().zip(f.abs()).all(|(a, b)| *a >= b));
    }

    #[test]
    fn local_version() {
        let s = line(128.0);
        let o = s.origin();
        let omega: Vec<bool> = (0..s.len()).map(|i| s.dist(i, o) < 100.0).collect();
        let f = GridFunction::from_real((0..s.len()).map(|i| ((i * 13) % 7) as f64).collect());
        let huge = local_maximal_fn(&s, &f, 1.0, &omega, 1e9);
        // Only singleton balls qualify.
        for x in 0..s.len() {
            let want = if omega[x] { f.get(x).norm() } else { 0.0 };
            assert_eq!(huge[x], want);
        }
        let small = local_maximal_fn(&s, &f, 1.0, &omega, 1.0);
        let big = local_maximal_fn(&s, &f, 1.0, &omega, 4.0);
        assert!(small.iter().zip(&big).all(|(a, b)| a >= b));
        // Deep inside Ω with Δ = 1 the local supremum sees the small balls of the global one.
        let global = maximal_fn(&s, &f, 1.0);
        assert!(small[o] <= global[o]);
    }
}
