use num_complex::Complex64;
use rand::Rng as _;

use crate::error::{invalid, Result};
use crate::function::GridFunction;
use crate::seeding;
use crate::space::{Ball, HomogeneousSpace};

/// Mean-zero function supported in a ball, normalized to `⟨b⟩_{p,B} = 1`.
#[derive(Debug, Clone)]
pub struct Atom {
    pub ball: Ball,
    pub values: GridFunction,
    pub p: f64,
}

impl Atom {
    /// `|∫ b| / ‖b‖₁`.
    pub fn mean_defect(&self, space: &HomogeneousSpace) -> f64 {
        self.values.integral(space).norm() / self.values.norm_p(space, 1.0)
    }
}

pub fn make_atom(space: &HomogeneousSpace, ball: &Ball, p: f64, seed: u64) -> Result<Atom> {
    if ball.len() < 2 {
        return invalid(format!("ball at {} of scale {} has fewer than two points", ball.center(), ball.scale()));
    }
    if !(p >= 1.0) {
        return invalid(format!("atom exponent must be at least 1, got {p}"));
    }
    let mut rng = seeding::stream(seed, 0xa70);
    let w = space.weights();
    loop {
        let raw: Vec<f64> = ball.members().iter().map(|_| rng.random_range(-1.0..1.0)).collect();
        let mean = ball.members().iter().zip(&raw).map(|(&i, v)| v * w[i]).sum::<f64>() / ball.measure();
        let mut values = vec![0.0; space.len()];
        for (&i, v) in ball.members().iter().zip(&raw) {
            values[i] = v - mean;
        }
        let f = GridFunction::from_real(values);
        let size = f.avg_p(space, p, ball.members());
        if size > 1e-8 {
            return Ok(Atom { ball: ball.clone(), values: f.scale(Complex64::new(1.0 / size, 0.0)), p });
        }
    }
}
