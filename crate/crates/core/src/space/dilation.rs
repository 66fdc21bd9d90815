use crate::error::{invalid, Result};
use crate::scalar::Float;

/// Anisotropic dilations `δ_t x = (t^{α_1} x_1, …, t^{α_n} x_n)` with the
/// homogeneous quasi-norm `ρ(x) = (Σ |x_j|^{2/α_j})^{1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DilationGroup<T: Float> {
    exponents: Vec<T>,
}

impl<T: Float> DilationGroup<T> {
    pub fn new(exponents: Vec<T>) -> Result<Self> {
        if exponents.is_empty() {
            return invalid("dilation group needs at least one exponent");
        }
        if exponents.iter().any(|a| !(*a > T::zero()) || !a.is_finite()) {
            return invalid("dilation exponents must be positive and finite");
        }
        Ok(Self { exponents })
    }

    /// Isotropic group on `R^n` (Euclidean norm).
    pub fn isotropic(n: usize) -> Self {
        Self { exponents: vec![T::one(); n.max(1)] }
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    pub fn exponents(&self) -> &[T] {
        &self.exponents
    }

    /// `α = α_1 + ⋯ + α_n`, the volume-growth exponent of ρ-balls.
    pub fn homogeneous_dimension(&self) -> T {
        self.exponents.iter().copied().sum()
    }

    pub fn dilate(&self, t: T, x: &[T]) -> Vec<T> {
        x.iter().zip(&self.exponents).map(|(&xj, &a)| t.powf(a) * xj).collect()
    }

    pub fn rho(&self, x: &[T]) -> T {
        let two = T::one() + T::one();
        x.iter()
            .zip(&self.exponents)
            .map(|(&xj, &a)| {
                let v = xj.abs();
                if a == T::one() {
                    v * v
                } else if a == two {
                    v
                } else {
                    v.powf(two / a)
                }
            })
            .sum::<T>()
            .sqrt()
    }

    /// Half-widths of the coordinate box containing the open ρ-ball of radius `r`.
    pub fn box_half_widths(&self, r: T) -> Vec<T> {
        self.exponents.iter().map(|&a| r.powf(a)).collect()
    }

    /// Quasi-triangle constant known in closed form: 1 when every exponent is at
    /// least 1 (coordinatewise subadditivity plus Minkowski), otherwise unknown.
    pub fn analytic_quasi_constant(&self) -> Option<T> {
        if self.exponents.iter().all(|&a| a >= T::one()) {
            Some(T::one())
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_of_three_four() {
        let g = DilationGroup::new(vec![1.0_f64, 2.0]).unwrap();
        assert_eq!(g.rho(&[3.0, 4.0]), 13.0_f64.sqrt());
        let d = g.dilate(2.0, &[3.0, 4.0]);
        assert_eq!(d, vec![6.0, 16.0]);
        assert_eq!(g.rho(&d), 2.0 * 13.0_f64.sqrt());
        assert_eq!(g.homogeneous_dimension(), 3.0);
    }

    #[test]
    fn single_precision_agrees() {
        let g = DilationGroup::new(vec![1.0_f32, 2.0]).unwrap();
        assert!((g.rho(&[3.0, 4.0]) - 13.0_f32.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_exponents() {
        assert!(DilationGroup::new(vec![1.0, 0.0]).is_err());
        assert!(DilationGroup::<f64>::new(vec![]).is_err());
    }
}
