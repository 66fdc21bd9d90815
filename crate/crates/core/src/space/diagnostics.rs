use rand::Rng as _;

use super::homogeneous::HomogeneousSpace;
use crate::seeding;
use crate::stats::{fit_line, LinearFit};

/// Doubling and volume-growth estimates over sampled interior balls.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DoublingReport {
    /// `max |2B| / |B|` over sampled interior balls.
    pub beta: f64,
    /// Slope of `log |B(o, 2^s)|` against `log 2^s` at the origin.
    pub alpha_fit: Option<LinearFit>,
    /// Lower-bound constants of `|B(x,r)| / |B(z,R)| ≥ Δ_X (r/R)^{δ_X}` for nested pairs.
    pub delta_x: f64,
    pub delta_x_exponent: f64,
    pub sampled: usize,
    /// Balls dropped because they touch the grid extent.
    pub excluded: usize,
}

pub fn doubling_diagnostics(space: &HomogeneousSpace, sample_size: usize, seed: u64) -> DoublingReport {
    let n = space.len();
    let mut rng = seeding::stream(seed, 0xd0b1);
    let s_lo = space.singleton_scale();
    let s_hi = space.top_scale();
    let mut beta: f64 = 1.0;
    let mut sampled = 0;
    let mut excluded = 0;
    let mut pair_x = Vec::new();
    let mut pair_y = Vec::new();
    for t in 0..sample_size.max(1) {
        let c = if t == 0 { space.origin() } else { rng.random_range(0..n) };
        for s in s_lo..=s_hi {
            let r = 2f64.powi(s);
            if space.escapes_extent(c, 2.0 * r) {
                excluded += 1;
                continue;
            }
            let b = space.ball(c, s);
            let b2 = space.ball(c, s + 1);
            sampled += 1;
            beta = beta.max(b2.measure() / b.measure());
            // Nested pair B(x, 2^{s-j}) ⊂ B(c, 2^s) with x drawn from B(c, 2^{s-1}).
            for j in 1..=3 {
                let inner_center = {
                    let half = space.members_within(c, r / 2.0);
                    half[rng.random_range(0..half.len())]
                };
                let inner = space.ball(inner_center, s - j);
                if inner.members().iter().all(|&m| b.contains(m)) {
                    pair_x.push((inner.radius() / r).ln());
                    pair_y.push((inner.measure() / b.measure()).ln());
                }
            }
        }
    }
    let origin = space.origin();
    let (mut gx, mut gy) = (Vec::new(), Vec::new());
    for s in (s_lo + 1)..=s_hi {
        let r = 2f64.powi(s);
        if space.escapes_extent(origin, r) {
            break;
        }
        gx.push(r.ln());
        gy.push(space.ball(origin, s).measure().ln());
    }
    let alpha_fit = fit_line(&gx, &gy);
    let (delta_x, delta_x_exponent) = match fit_line(&pair_x, &pair_y) {
        Some(f) => {
            let d = f.slope.max(0.0);
            let c = pair_x.iter().zip(&pair_y).map(|(x, y)| (y - d * x).exp()).fold(f64::INFINITY, f64::min);
            (c.min(1.0), d)
        }
        None => (1.0, 0.0),
    };
    DoublingReport { beta, alpha_fit, delta_x, delta_x_exponent, sampled, excluded }
}

/// Geometric doubling number: the largest greedy count of half-radius balls
/// needed to cover a sampled ball, over scales in `s_range`.
pub fn check_geometric_doubling(
    space: &HomogeneousSpace,
    s_range: std::ops::RangeInclusive<i32>,
    centers: &[usize],
) -> usize {
    let mut worst = 1;
    let default = [space.origin()];
    let centers = if centers.is_empty() { &default[..] } else { centers };
    for &c in centers {
        for s in s_range.clone() {
            let r = 2f64.powi(s);
            let members = space.members_within(c, r);
            let candidates = space.members_within(c, 1.5 * space.c_d() * r + space.min_separation());
            let half_balls: Vec<Vec<usize>> = candidates
                .iter()
                .map(|&p| {
                    let hb = space.members_within(p, r / 2.0);
                    hb.into_iter().filter(|m| members.binary_search(m).is_ok()).collect()
                })
                .collect();
            let mut covered = vec![false; space.len()];
            let mut left = members.len();
            let mut count = 0;
            while left > 0 {
                let (best, gain) = half_balls
                    .iter()
                    .enumerate()
                    .map(|(i, hb)| (i, hb.iter().filter(|&&m| !covered[m]).count()))
                    .fold((0, 0), |acc, x| if x.1 > acc.1 { x } else { acc });
                if gain == 0 {
                    break;
                }
                for &m in &half_balls[best] {
                    if !covered[m] {
                        covered[m] = true;
                        left -= 1;
                    }
                }
                count += 1;
            }
            worst = worst.max(count);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_cloud_space, build_grid_space, GridSpec};

    #[test]
    fn line_doubles_by_two() {
        let s = build_grid_space(&GridSpec::new(vec![1.0], 1.0, vec![512.0])).unwrap();
        let r = doubling_diagnostics(&s, 8, 1);
        assert!(r.beta <= 3.0 && r.beta >= 1.6, "beta {}", r.beta);
        let fit = r.alpha_fit.unwrap();
        assert!((fit.slope - 1.0).abs() < 0.15);
        assert!(r.delta_x <= 1.0);
    }

    #[test]
    fn line_geometric_doubling_is_three() {
        let s = build_grid_space(&GridSpec::new(vec![1.0], 1.0, vec![128.0])).unwrap();
        assert_eq!(check_geometric_doubling(&s, 2..=5, &[]), 3);
    }

    #[test]
    fn single_point_needs_one_ball() {
        let s = build_cloud_space(vec![0.0], vec![1.0], None).unwrap();
        assert_eq!(check_geometric_doubling(&s, 0..=2, &[]), 1);
    }
}
