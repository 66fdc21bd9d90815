use std::io::Write;

use crate::error::{Error, Result};
use crate::function::GridFunction;
use crate::space::{Ball, HomogeneousSpace};

use super::ladder::StoppingLadder;

/// A sparse family of balls with pairwise disjoint major subsets.
#[derive(Debug, Clone)]
pub struct SparseCollection {
    /// `(level, ball)` pairs.
    pub balls: Vec<(usize, Ball)>,
    /// Major subset `E_B` of each ball, sorted point indices.
    pub major: Vec<Vec<usize>>,
    /// `min |E_B| / |B|`.
    pub zeta: f64,
    pub c1: f64,
}

impl SparseCollection {
    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    /// Exact check that every `E_B ⊂ B` and that the `E_B` are pairwise disjoint.
    pub fn disjoint_and_contained(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        for ((_, b), e) in self.balls.iter().zip(&self.major) {
            for &x in e {
                if seen[x] || !b.contains(x) {
                    return false;
                }
                seen[x] = true;
            }
        }
        true
    }

    /// Ladder rows `level, ball_id, center, s, |B|, |E_B|, zeta_local`.
    pub fn write_csv<W: Write>(&self, space: &HomogeneousSpace, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["level", "ball_id", "center", "s", "|B|", "|E_B|", "zeta_local"])?;
        for (id, ((level, b), e)) in self.balls.iter().zip(&self.major).enumerate() {
            let eb = space.measure_of(e);
            w.write_record([
                level.to_string(),
                id.to_string(),
                b.center().to_string(),
                b.scale().to_string(),
                format!("{:.12e}", b.measure()),
                format!("{eb:.12e}"),
                format!("{:.12e}", eb / b.measure()),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `E_B := B(c_B, r_B/5) ∖ E_{k+1}` for every ball of levels `0..=K`.
pub fn certify_sparse(space: &HomogeneousSpace, ladder: &StoppingLadder) -> Result<SparseCollection> {
    let k_top = ladder.levels.len() - 1;
    let mut balls = Vec::new();
    let mut major = Vec::new();
    let mut zeta = f64::INFINITY;
    let mut seen = vec![false; space.len()];
    for k in 0..k_top {
        let below = &ladder.levels[k + 1].set;
        for (id, b) in ladder.levels[k].balls.iter().enumerate() {
            let e: Vec<usize> =
                space.members_within(b.center(), b.radius() / 5.0).into_iter().filter(|&x| !below[x]).collect();
            if e.is_empty() {
                return Err(Error::EmptyMajorSubset { level: k, ball: id, center: b.center(), scale: b.scale() });
            }
            for &x in &e {
                if seen[x] {
                    return Err(Error::Check(format!("major subsets overlap at point {x} (level {k}, ball {id})")));
                }
                seen[x] = true;
            }
            zeta = zeta.min(space.measure_of(&e) / b.measure());
            balls.push((k, b.clone()));
            major.push(e);
        }
    }
    Ok(SparseCollection { balls, major, zeta, c1: ladder.c1 })
}

/// `Σ_B |B| ⟨f1⟩_{p1,c1B} ⟨f2⟩_{p2,c1B}`.
pub fn sparse_form(
    space: &HomogeneousSpace,
    balls: &[Ball],
    f1: &GridFunction,
    f2: &GridFunction,
    p1: f64,
    p2: f64,
    c1: f64,
) -> f64 {
    balls
        .iter()
        .map(|b| {
            let pts = space.members_within(b.center(), c1 * b.radius());
            b.measure() * f1.avg_p(space, p1, &pts) * f2.avg_p(space, p2, &pts)
        })
        .sum()
}

impl SparseCollection {
    /// [`sparse_form`] over this collection with its own `c1`.
    pub fn form(&self, space: &HomogeneousSpace, f1: &GridFunction, f2: &GridFunction, p1: f64, p2: f64) -> f64 {
        let balls: Vec<Ball> = self.balls.iter().map(|(_, b)| b.clone()).collect();
        sparse_form(space, &balls, f1, f2, p1, p2, self.c1)
    }
}
