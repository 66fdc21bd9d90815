//! Functions sampled on the points of a space.

use num_complex::Complex64;

use crate::space::HomogeneousSpace;

/// Complex values indexed like the points of a [`HomogeneousSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn zeros(n: usize) -> Self {
        Self { values: vec![Complex64::new(0.0, 0.0); n] }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self { values: vec![Complex64::new(c, 0.0); n] }
    }

    pub fn from_real(values: Vec<f64>) -> Self {
        Self { values: values.into_iter().map(|v| Complex64::new(v, 0.0)).collect() }
    }

    pub fn from_complex(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    /// `1_S` for a list of indices.
    pub fn indicator(n: usize, members: &[usize]) -> Self {
        let mut f = Self::zeros(n);
        for &i in members {
            f.values[i] = Complex64::new(1.0, 0.0);
        }
        f
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn get(&self, i: usize) -> Complex64 {
        self.values[i]
    }

    pub fn set(&mut self, i: usize, v: Complex64) {
        self.values[i] = v;
    }

    pub fn abs(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Indices of the nonzero values, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.values[i] != Complex64::new(0.0, 0.0)).collect()
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self { values: self.values.iter().map(|v| v * a).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect() }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
    }

    /// Pointwise product with a real multiplier.
    pub fn mul_real(&self, m: &[f64]) -> Self {
        Self { values: self.values.iter().zip(m).map(|(a, b)| a * b).collect() }
    }

    /// `f·1_S` for sorted or unsorted member indices.
    pub fn restrict(&self, members: &[usize]) -> Self {
        let mut out = Self::zeros(self.len());
        for &i in members {
            out.values[i] = self.values[i];
        }
        out
    }

    /// `f·1_{mask}`.
    pub fn restrict_mask(&self, mask: &[bool]) -> Self {
        Self {
            values: self.values.iter().zip(mask).map(|(v, &m)| if m { *v } else { Complex64::new(0.0, 0.0) }).collect(),
        }
    }

    /// `⟨f⟩_{p,S} = (|S|⁻¹ Σ_{x∈S} |f(x)|^p μ_x)^{1/p}`; `p = ∞` gives the max.
    pub fn avg_p(&self, space: &HomogeneousSpace, p: f64, members: &[usize]) -> f64 {
        if members.is_empty() {
            return 0.0;
        }
        if p.is_infinite() {
            return members.iter().map(|&i| self.values[i].norm()).fold(0.0, f64::max);
        }
        let w = space.weights();
        let mut num = 0.0;
        let mut den = 0.0;
        for &i in members {
            num += self.values[i].norm().powf(p) * w[i];
            den += w[i];
        }
        (num / den).powf(1.0 / p)
    }

    /// `‖f‖_p` with the space weights.
    pub fn norm_p(&self, space: &HomogeneousSpace, p: f64) -> f64 {
        if p.is_infinite() {
            return self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        }
        let s: f64 = self.values.iter().zip(space.weights()).map(|(v, w)| v.norm().powf(p) * w).sum();
        s.powf(1.0 / p)
    }

    /// `∫ f dμ`.
    pub fn integral(&self, space: &HomogeneousSpace) -> Complex64 {
        self.values.iter().zip(space.weights()).map(|(v, w)| v * w).sum()
    }

    /// `⟨f, g⟩ = Σ f(x) conj(g(x)) μ_x`.
    pub fn inner(&self, space: &HomogeneousSpace, g: &Self) -> Complex64 {
        self.values.iter().zip(&g.values).zip(space.weights()).map(|((a, b), w)| a * b.conj() * w).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_grid_space, GridSpec};

    #[test]
    fn constant_averages_are_exact() {
        let s = build_grid_space(&GridSpec::new(vec![1.0, 2.0], 0.5, vec![4.0, 4.0])).unwrap();
        let f = GridFunction::constant(s.len(), 1.0);
        let b = s.ball(s.origin(), 1);
        for p in [1.0, 1.5, 2.0, f64::INFINITY] {
            assert_eq!(f.avg_p(&s, p, b.members()), 1.0);
        }
    }

    #[test]
    fn inner_is_conjugate_linear_in_second_slot() {
        let s = build_grid_space(&GridSpec::new(vec![1.0], 1.0, vec![2.0])).unwrap();
        let f = GridFunction::from_real(vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        let g = f.scale(Complex64::new(0.0, 1.0));
        assert_eq!(f.inner(&s, &g), Complex64::new(0.0, -55.0));
    }
}
