use crate::error::{invalid, Result};
use crate::scalar::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModulusForm {
    Power,
    Log,
    Custom,
}

/// Samples `ω(2^{-k})`, `k = 0..=K`, of a modulus of continuity.
#[derive(Debug, Clone, PartialEq)]
pub struct Modulus<T: Float> {
    /// `(t_k, ω(t_k))` with `t_k = 2^{-k}`, decreasing in `t`.
    pub samples: Vec<(T, T)>,
    pub form: ModulusForm,
}

/// Default number of dyadic samples below 1.
pub const DINI_FLOOR: usize = 64;

impl<T: Float> Modulus<T> {
    pub fn from_fn(form: ModulusForm, floor: usize, omega: impl Fn(T) -> T) -> Self {
        let two = T::of(2.0);
        let samples = (0..=floor).map(|k| {
            let t = two.powi(-(k as i32));
            (t, omega(t))
        });
        Self { samples: samples.collect(), form }
    }

    /// `ω(t) = t^ε`.
    pub fn power(eps: T) -> Self {
        Self::from_fn(ModulusForm::Power, DINI_FLOOR, |t| t.powf(eps))
    }

    /// `ω(t) = 1 / log(e/t)`, continuous but not Dini.
    pub fn log() -> Self {
        Self::from_fn(ModulusForm::Log, DINI_FLOOR, |t| T::one() / (T::E() / t).ln())
    }

    /// Nondecreasing in `t` up to a relative slack of `1e-12`.
    pub fn is_monotone(&self) -> bool {
        self.samples.windows(2).all(|w| w[1].1 <= w[0].1 + T::of(1e-12) * w[0].1.abs())
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DiniNorm {
    pub value: f64,
    /// The partial sums still grew by more than 1% over the last half of the samples.
    pub divergent: bool,
}

/// `∫₀¹ ω(δ) dδ/δ` as a trapezoid sum in `u = −log δ` over the dyadic samples:
/// `log 2 · (ω(1)/2 + Σ_{k≥1} ω(2^{-k}))`.
pub fn dini_norm<T: Float>(modulus: &Modulus<T>) -> Result<DiniNorm> {
    let s = &modulus.samples;
    if s.len() < 4 {
        return invalid(format!("need at least four dyadic samples, got {}", s.len()));
    }
    if !modulus.is_monotone() {
        return invalid("modulus samples are not monotone");
    }
    let w: Vec<f64> = s.iter().map(|&(_, v)| v.to_f64_lossy()).collect();
    let mut partial = Vec::with_capacity(w.len());
    let mut acc = 0.5 * w[0];
    partial.push(acc);
    for v in &w[1..] {
        acc += v;
        partial.push(acc);
    }
    let ln2 = std::f64::consts::LN_2;
    let last = partial[partial.len() - 1];
    let half = partial[(partial.len() - 1) / 2];
    let divergent = last > 0.0 && (last - half) > 0.01 * last;
    Ok(DiniNorm { value: ln2 * last, divergent })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_and_square_root() {
        let one = dini_norm(&Modulus::<f64>::power(1.0)).unwrap();
        assert!(!one.divergent && (one.value - 1.0).abs() < 0.15);
        let half = dini_norm(&Modulus::<f64>::power(0.5)).unwrap();
        assert!(!half.divergent && (half.value - 2.0).abs() < 0.3);
        let single = dini_norm(&Modulus::<f32>::power(1.0)).unwrap();
        assert!((single.value - one.value).abs() < 1e-6);
    }

    #[test]
    fn log_modulus_diverges() {
        assert!(dini_norm(&Modulus::<f64>::log()).unwrap().divergent);
    }

    #[test]
    fn rejects_non_monotone() {
        let m = Modulus::<f64> {
            samples: vec![(1.0, 1.0), (0.5, 2.0), (0.25, 0.1), (0.125, 0.0)],
            form: ModulusForm::Custom,
        };
        assert!(dini_norm(&m).is_err());
    }
}
