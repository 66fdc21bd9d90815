use std::f64::consts::PI;
use std::ops::RangeInclusive;

use crate::error::{invalid, Result};
use crate::operators::DiscreteMeasure;
use crate::stats::{fit_line, LinearFit};

/// Sampling of the dyadic frequency shells `2^j ≤ |ξ| < 2^{j+1}`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ShellSampling {
    pub shells: RangeInclusive<i32>,
    /// Directions per shell, uniform in angle (ignored in 1D, where both signs are used).
    pub directions: usize,
    /// Geometrically spaced radii per shell.
    pub radii: usize,
}

impl Default for ShellSampling {
    fn default() -> Self {
        Self { shells: 3..=10, directions: 16, radii: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DecayFit {
    /// `−` slope of `log₂ sup_shell |m̂|` against the shell index.
    pub beta: f64,
    pub fit: LinearFit,
    /// `(j, sup over the shell of |m̂(ξ)|)`.
    pub envelope: Vec<(i32, f64)>,
}

impl DecayFit {
    pub fn conclusive(&self) -> bool {
        self.fit.conclusive()
    }
}

fn directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        // Coordinate axes and diagonals; enough for a lower bound on the sup.
        _ => {
            let mut out = Vec::new();
            for j in 0..dim {
                for sign in [1.0, -1.0] {
                    let mut v = vec![0.0; dim];
                    v[j] = sign;
                    out.push(v);
                }
            }
            let d = 1.0 / (dim as f64).sqrt();
            out.push(vec![d; dim]);
            out.push(vec![-d; dim]);
            out
        }
    }
}

/// Shell envelope of `|m̂(ξ)| = |Σ m_k e^{−iξ·x_k}|` and its log-log decay exponent.
pub fn fourier_decay_fit(measure: &DiscreteMeasure, sampling: &ShellSampling) -> Result<DecayFit> {
    let (lo, hi) = (*sampling.shells.start(), *sampling.shells.end());
    if hi - lo + 1 < 4 {
        return invalid(format!("need at least four dyadic shells, got {lo}..={hi}"));
    }
    if sampling.radii == 0 || sampling.directions == 0 {
        return invalid("shell sampling needs at least one direction and one radius");
    }
    let dirs = directions(measure.dim, sampling.directions);
    let envelope: Vec<(i32, f64)> = (lo..=hi)
        .map(|j| {
            let mut sup: f64 = 0.0;
            for i in 0..sampling.radii {
                let r = 2f64.powf(j as f64 + i as f64 / sampling.radii as f64);
                for d in &dirs {
                    let xi: Vec<f64> = d.iter().map(|c| c * r).collect();
                    sup = sup.max(measure.fourier(&xi).norm());
                }
            }
            (j, sup)
        })
        .collect();
    let x: Vec<f64> = envelope.iter().map(|&(j, _)| j as f64).collect();
    let y: Vec<f64> = envelope.iter().map(|&(_, v)| v.max(f64::MIN_POSITIVE).log2()).collect();
    let fit = fit_line(&x, &y).expect("at least four distinct shells");
    Ok(DecayFit { beta: -fit.slope, fit, envelope })
}
