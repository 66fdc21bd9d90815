//! All-centers ball reductions on grids, one pass per last-axis run of the ball shape.

use super::ball::BallShape;
use super::homogeneous::GridMeta;

struct Lines {
    len: usize,
    count: usize,
    /// Line index shift per prefix axis, with the axis bounds for validity checks.
    prefix_coords: Vec<Vec<i64>>,
}

impl Lines {
    fn new(g: &GridMeta) -> Self {
        let dim = g.dim();
        let len = g.shape[dim - 1];
        let count = g.len() / len;
        let prefix_coords = (0..count).map(|ln| g.coords(ln * len)[..dim - 1].to_vec()).collect();
        Self { len, count, prefix_coords }
    }

    fn target(&self, g: &GridMeta, ln: usize, pre: &[i64]) -> Option<usize> {
        let mut t = 0usize;
        for (j, &o) in pre.iter().enumerate() {
            let k = self.prefix_coords[ln][j] + o;
            if k.abs() > g.half[j] {
                return None;
            }
            t += (k + g.half[j]) as usize * (g.strides[j] / self.len);
        }
        Some(t)
    }
}

pub(crate) fn grid_ball_sums(g: &GridMeta, shape: &BallShape, values: &[f64]) -> Vec<f64> {
    let lines = Lines::new(g);
    let l = lines.len;
    let mut prefix = vec![0.0; lines.count * (l + 1)];
    for ln in 0..lines.count {
        let row = &mut prefix[ln * (l + 1)..(ln + 1) * (l + 1)];
        for i in 0..l {
            row[i + 1] = row[i] + values[ln * l + i];
        }
    }
    let mut out = vec![0.0; values.len()];
    for (pre, a) in &shape.runs {
        let a = *a as usize;
        for ln in 0..lines.count {
            let Some(t) = lines.target(g, ln, pre) else {
                continue;
            };
            let row = &prefix[t * (l + 1)..(t + 1) * (l + 1)];
            let dst = &mut out[ln * l..(ln + 1) * l];
            for (i, d) in dst.iter_mut().enumerate() {
                let lo = i.saturating_sub(a);
                let hi = (i + a).min(l - 1);
                *d += row[hi + 1] - row[lo];
            }
        }
    }
    out
}

pub(crate) fn grid_ball_max(g: &GridMeta, shape: &BallShape, values: &[f64]) -> Vec<f64> {
    let lines = Lines::new(g);
    let l = lines.len;
    let n = values.len();
    // Sparse table: level k holds max over [i, i + 2^k) within each line.
    let mut levels: Vec<Vec<f64>> = vec![values.to_vec()];
    let mut width = 1;
    while 2 * width <= l {
        let prev = levels.last().expect("level");
        let mut next = vec![f64::NEG_INFINITY; n];
        for ln in 0..lines.count {
            for i in 0..=l - 2 * width {
                let p = ln * l + i;
                next[p] = prev[p].max(prev[p + width]);
            }
        }
        levels.push(next);
        width *= 2;
    }
    let mut out = vec![f64::NEG_INFINITY; n];
    for (pre, a) in &shape.runs {
        let a = *a as usize;
        for ln in 0..lines.count {
            let Some(t) = lines.target(g, ln, pre) else {
                continue;
            };
            for i in 0..l {
                let lo = i.saturating_sub(a);
                let hi = (i + a).min(l - 1);
                let span = hi - lo + 1;
                let k = (usize::BITS - 1 - span.leading_zeros()) as usize;
                let w = 1usize << k;
                let row = &levels[k];
                let m = row[t * l + lo].max(row[t * l + hi + 1 - w]);
                let d = &mut out[ln * l + i];
                if m > *d {
                    *d = m;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use crate::space::{build_grid_space, GridSpec};

    #[test]
    fn sums_and_max_match_brute_force() {
        let s = build_grid_space(&GridSpec::new(vec![1.0, 2.0], 1.0, vec![5.0, 7.0])).unwrap();
        let v: Vec<f64> = (0..s.len()).map(|i| ((i * 37) % 11) as f64 - 3.0).collect();
        for r in [0.5, 1.0, 2.5, 4.0] {
            let sums = s.ball_sums(r, &v);
            let maxs = s.ball_max(r, &v);
            for x in 0..s.len() {
                let m = s.members_within(x, r);
                let bs: f64 = m.iter().map(|&j| v[j]).sum();
                let bm = m.iter().map(|&j| v[j]).fold(f64::NEG_INFINITY, f64::max);
                assert!((sums[x] - bs).abs() < 1e-9, "sum at {x} r={r}");
                assert_eq!(maxs[x], bm, "max at {x} r={r}");
            }
        }
    }
}
