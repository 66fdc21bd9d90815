use crate::error::{Error, Result};
use crate::space::{Ball, HomogeneousSpace};

/// Cone-bump partition of unity subordinate to a fixed-scale cover.
#[derive(Debug, Clone)]
pub struct PartitionOfUnity {
    pub scale: i32,
    pub c2: f64,
    /// Sparse `ψ_τ` as `(point, value)` pairs, sorted by point.
    pub psi: Vec<Vec<(usize, f64)>>,
    pub covered: Vec<bool>,
    /// `min_τ min_{L_τ} ψ_τ`.
    pub theta: f64,
}

/// `ψ_τ = b_τ / Σ_σ b_σ` on `∪ L_τ`, with `b_τ(x) = (1 − d(x,c_τ)/(c₂2^s))₊` on `c₂L_τ`.
pub fn partition_of_unity(space: &HomogeneousSpace, balls: &[Ball], s: i32, c2: f64) -> Result<PartitionOfUnity> {
    let n = space.len();
    let r = c2 * 2f64.powi(s);
    let mut covered = vec![false; n];
    for b in balls {
        for &j in b.members() {
            covered[j] = true;
        }
    }
    let raw: Vec<Vec<(usize, f64)>> = balls
        .iter()
        .map(|b| {
            space
                .members_within(b.center(), r)
                .into_iter()
                .filter(|&x| covered[x])
                .map(|x| (x, (1.0 - space.dist(x, b.center()) / r).clamp(0.0, 1.0)))
                .filter(|&(_, v)| v > 0.0)
                .collect()
        })
        .collect();
    let mut total = vec![0.0; n];
    for bump in &raw {
        for &(x, v) in bump {
            total[x] += v;
        }
    }
    if let Some(x) = (0..n).find(|&x| covered[x] && total[x] <= 0.0) {
        return Err(Error::InvalidSet(format!("point {x} is covered but no bump reaches it")));
    }
    let psi: Vec<Vec<(usize, f64)>> =
        raw.into_iter().map(|bump| bump.into_iter().map(|(x, v)| (x, v / total[x])).collect()).collect();
    let theta = psi
        .iter()
        .zip(balls)
        .flat_map(|(p, b)| p.iter().filter(move |(x, _)| b.contains(*x)).map(|&(_, v)| v))
        .fold(f64::INFINITY, f64::min);
    Ok(PartitionOfUnity { scale: s, c2, psi, covered, theta })
}

/// `φ_B = b_B / Σ b` with `b_B(x) = 1 − d(x, c_B)/r_B` on `B` itself, so
/// `supp φ_B ⊂ B` and `Σ φ_B = 1` on `∪ B`. Returned sparse, one entry per ball.
pub fn ball_partition(space: &HomogeneousSpace, balls: &[Ball]) -> Vec<Vec<(usize, f64)>> {
    let mut total = vec![0.0; space.len()];
    let raw: Vec<Vec<(usize, f64)>> = balls
        .iter()
        .map(|b| {
            b.members()
                .iter()
                .map(|&x| (x, (1.0 - space.dist(x, b.center()) / b.radius()).max(f64::MIN_POSITIVE)))
                .collect()
        })
        .collect();
    for bump in &raw {
        for &(x, v) in bump {
            total[x] += v;
        }
    }
    raw.into_iter().map(|bump| bump.into_iter().map(|(x, v)| (x, v / total[x])).collect()).collect()
}

impl PartitionOfUnity {
    /// `Σ_τ ψ_τ(x)` for every point.
    pub fn sum(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for p in &self.psi {
            for &(x, v) in p {
                out[x] += v;
            }
        }
        out
    }

    pub fn dense(&self, tau: usize, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for &(x, v) in &self.psi[tau] {
            out[x] = v;
        }
        out
    }

    /// `max |ψ_τ(x) − ψ_τ(y)|·2^s / d(x,y)` over covered pairs at distance
    /// below `2^s`; on grids these are the pairs inside one scale-`s` ball.
    pub fn lipschitz_constant(&self, space: &HomogeneousSpace) -> f64 {
        let n = space.len();
        let r = 2f64.powi(self.scale);
        let mut worst: f64 = 0.0;
        for tau in 0..self.psi.len() {
            let dense = self.dense(tau, n);
            for &(x, _) in &self.psi[tau] {
                let reach = match space.grid() {
                    Some(_) => space.min_separation() * 1.5,
                    None => r,
                };
                for y in space.members_within(x, reach) {
                    if y != x && self.covered[y] {
                        let d = space.dist(x, y);
                        worst = worst.max((dense[x] - dense[y]).abs() * r / d);
                    }
                }
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_grid_space, GridSpec};

    fn line() -> HomogeneousSpace {
        build_grid_space(&GridSpec::new(vec![1.0], 1.0, vec![64.0])).unwrap()
    }

    #[test]
    fn single_ball_is_one() {
        let s = line();
        let b = s.ball(s.origin(), 3);
        let p = partition_of_unity(&s, std::slice::from_ref(&b), 3, 2.0).unwrap();
        for &m in b.members() {
            assert_eq!(p.sum(s.len())[m], 1.0);
        }
    }

    #[test]
    fn halfway_overlap() {
        let s = line();
        let o = s.origin();
        let balls = [s.ball(o, 3), s.ball(o + 8, 3)];
        let p = partition_of_unity(&s, &balls, 3, 2.0).unwrap();
        let sum = p.sum(s.len());
        for x in 0..s.len() {
            if p.covered[x] {
                assert!((sum[x] - 1.0).abs() <= 1e-12);
            }
        }
        let mid = p.dense(0, s.len())[o + 4];
        assert!(mid > 0.0 && mid < 1.0);
        assert!(p.theta > 0.0);
        assert!(p.lipschitz_constant(&s) < 4.0);
    }
}
