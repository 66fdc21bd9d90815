use super::homogeneous::{GridMeta, HomogeneousSpace};

/// Open ball `B(c, factor·2^scale)` with its member set and measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    center: usize,
    scale: i32,
    factor: f64,
    members: Vec<usize>,
    measure: f64,
}

impl Ball {
    pub(crate) fn from_parts(center: usize, scale: i32, factor: f64, members: Vec<usize>, measure: f64) -> Self {
        Self { center, scale, factor, members, measure }
    }

    pub fn center(&self) -> usize {
        self.center
    }

    /// Dyadic scale `s` of the underlying radius `2^s` (before any dilation factor).
    pub fn scale(&self) -> i32 {
        self.scale
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }

    pub fn radius(&self) -> f64 {
        self.factor * 2f64.powi(self.scale)
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn measure(&self) -> f64 {
        self.measure
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.members.binary_search(&j).is_ok()
    }

    /// `aB`: same center, radius multiplied by `a`.
    pub fn dilate(&self, space: &HomogeneousSpace, a: f64) -> Ball {
        space.ball_scaled(self.center, self.scale, self.factor * a)
    }

    pub fn intersects(&self, other: &Ball) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.members.len() && j < other.members.len() {
            match self.members[i].cmp(&other.members[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }
}

/// Lattice offsets of `B(0, r)` in lexicographic order, plus the same set as
/// runs along the last axis.
#[derive(Debug)]
pub(crate) struct BallShape {
    pub dim: usize,
    pub offsets: Vec<i64>,
    /// `(prefix offsets on axes 0..n-1, half-width a)`: last-axis interval `[-a, a]`.
    pub runs: Vec<(Vec<i64>, i64)>,
    pub reach: Vec<i64>,
}

impl BallShape {
    pub fn count(&self) -> usize {
        self.offsets.len() / self.dim.max(1)
    }

    pub fn build(g: &GridMeta, r: f64) -> Self {
        let dim = g.dim();
        let widths = g.dilations.box_half_widths(r);
        // |k·h| < r^{α_j} strictly, capped by the lattice span.
        let maxk: Vec<i64> = widths
            .iter()
            .zip(&g.half)
            .map(|(&w, &n)| {
                let m = (w / g.step).ceil() as i64 - 1;
                m.clamp(-1, 2 * n)
            })
            .collect();
        let mut runs = Vec::new();
        let mut offsets = Vec::new();
        let mut reach = vec![0i64; dim];
        if maxk.iter().any(|&m| m < 0) {
            return Self { dim, offsets, runs, reach };
        }
        let last = dim - 1;
        let mut prefix: Vec<i64> = maxk[..last].iter().map(|&m| -m).collect();
        loop {
            let mut probe = prefix.clone();
            probe.push(0);
            if g.offset_rho(&probe) < r {
                let (mut lo, mut hi) = (0i64, maxk[last]);
                while lo < hi {
                    let mid = (lo + hi + 1) / 2;
                    probe[last] = mid;
                    if g.offset_rho(&probe) < r {
                        lo = mid;
                    } else {
                        hi = mid - 1;
                    }
                }
                for k in -lo..=lo {
                    offsets.extend_from_slice(&prefix);
                    offsets.push(k);
                }
                for j in 0..last {
                    reach[j] = reach[j].max(prefix[j].abs());
                }
                reach[last] = reach[last].max(lo);
                runs.push((prefix.clone(), lo));
            }
            // Odometer over the prefix box, last prefix axis fastest.
            let mut advanced = false;
            for j in (0..last).rev() {
                if prefix[j] < maxk[j] {
                    prefix[j] += 1;
                    for q in j + 1..last {
                        prefix[q] = -maxk[q];
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                return Self { dim, offsets, runs, reach };
            }
        }
    }
}
