use super::five_r::greedy_disjoint;
use super::whitney::overlap_counts;
use crate::space::{Ball, HomogeneousSpace};

/// Balls of one radius `2^s` covering a host set.
#[derive(Debug, Clone)]
pub struct FixedScaleCover {
    pub scale: i32,
    pub balls: Vec<Ball>,
    /// Smallest dilate of the host ball containing every `L_τ` (1 when the host is the whole space).
    pub c1: f64,
}

impl FixedScaleCover {
    /// `max_x Σ_τ 1_{ρL_τ}(x)`.
    pub fn overlap(&self, space: &HomogeneousSpace, rho: f64) -> usize {
        overlap_counts(space, &self.balls, rho).into_iter().max().unwrap_or(0)
    }
}

/// Covers `host` by balls of radius `2^s ≤ r_host`: greedy disjoint `B(x, 2^s/5)`
/// over `x ∈ host`, dilated by 5.
pub fn fixed_scale_cover(space: &HomogeneousSpace, host: &Ball, s: i32) -> FixedScaleCover {
    let cands = host.members().iter().map(|&x| (x, s, 0.2)).collect();
    let balls: Vec<Ball> = greedy_disjoint(space, cands).into_iter().map(|b| space.ball(b.center(), s)).collect();
    let c = host.center();
    let reach = balls.iter().flat_map(|b| b.members().iter().map(move |&y| space.dist(c, y))).fold(0.0, f64::max);
    FixedScaleCover { scale: s, balls, c1: (reach / host.radius() * (1.0 + 1e-12)).max(1.0) }
}

/// Fixed-scale cover of the whole space.
pub fn scale_cover(space: &HomogeneousSpace, s: i32) -> FixedScaleCover {
    let cands = (0..space.len()).map(|x| (x, s, 0.2)).collect();
    let balls = greedy_disjoint(space, cands).into_iter().map(|b| space.ball(b.center(), s)).collect();
    FixedScaleCover { scale: s, balls, c1: 1.0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_grid_space, GridSpec};

    #[test]
    fn top_scale_uses_few_balls() {
        let s = build_grid_space(&GridSpec::new(vec![1.0], 1.0, vec![64.0])).unwrap();
        let b = s.ball(s.origin(), 3);
        let c = fixed_scale_cover(&s, &b, 3);
        // Bounded by |B| / |B/5|, independent of the scale.
        assert!(c.balls.len() <= 6, "{}", c.balls.len());
    }

    #[test]
    fn unit_scale_on_radius_eight() {
        let s = build_grid_space(&GridSpec::new(vec![1.0], 1.0, vec![64.0])).unwrap();
        let b = s.ball(s.origin(), 3);
        let c = fixed_scale_cover(&s, &b, 0);
        assert!((12..=20).contains(&c.balls.len()));
        assert!(c.overlap(&s, 1.0) <= 3);
        let covered: Vec<usize> = c.balls.iter().flat_map(|l| l.members().to_vec()).collect();
        assert!(b.members().iter().all(|m| covered.contains(m)));
        assert!(c.overlap(&s, 5.0) <= 10);
    }
}
