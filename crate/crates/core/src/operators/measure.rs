use std::ops::RangeInclusive;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use super::family::{pow2_ceil, Family, SingleScaleFamily, Stencil};
use crate::error::{invalid, Error, Result};
use crate::function::GridFunction;
use crate::space::{DilationGroup, HomogeneousSpace};

/// Finitely supported complex measure on `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub masses: Vec<Complex64>,
    pub label: String,
}

impl DiscreteMeasure {
    pub fn new(dim: usize, points: Vec<Vec<f64>>, masses: Vec<Complex64>, label: &str) -> Result<Self> {
        if points.len() != masses.len() || points.is_empty() {
            return invalid("measure needs matching, nonempty point and mass lists");
        }
        if points.iter().any(|p| p.len() != dim) {
            return invalid(format!("measure points must have {dim} coordinates"));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) || masses.iter().any(|m| !m.norm().is_finite()) {
            return Err(Error::NonFinite("measure entries".into()));
        }
        Ok(Self { dim, points, masses, label: label.into() })
    }

    pub fn point_mass(dim: usize) -> Self {
        Self { dim, points: vec![vec![0.0; dim]], masses: vec![Complex64::new(1.0, 0.0)], label: "point".into() }
    }

    /// Equi-angular quadrature of the normalized arc-length measure on the unit circle.
    pub fn circle(nodes: usize) -> Result<Self> {
        if nodes < 16 {
            return invalid("circle quadrature needs at least 16 nodes");
        }
        let m = Complex64::new(1.0 / nodes as f64, 0.0);
        let points = (0..nodes)
            .map(|k| {
                let th = std::f64::consts::TAU * k as f64 / nodes as f64;
                vec![th.cos(), th.sin()]
            })
            .collect();
        Ok(Self { dim: 2, points, masses: vec![m; nodes], label: "circle".into() })
    }

    /// Reads rows `offset_1, …, offset_n, re, im`.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path)?;
        let headers = rdr.headers()?.clone();
        let dim = headers.iter().filter(|h| h.starts_with("offset_")).count();
        let expected: Vec<String> =
            (1..=dim).map(|j| format!("offset_{j}")).chain(["re".into(), "im".into()]).collect();
        if dim == 0 || headers.iter().collect::<Vec<_>>() != expected.iter().map(String::as_str).collect::<Vec<_>>() {
            return invalid(format!("measure CSV header must be {}", expected.join(",")));
        }
        let mut points = Vec::new();
        let mut masses = Vec::new();
        for row in rdr.records() {
            let row = row?;
            let v: Vec<f64> = row
                .iter()
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidParameter(format!("measure CSV: {e}")))?;
            points.push(v[..dim].to_vec());
            masses.push(Complex64::new(v[dim], v[dim + 1]));
        }
        Self::new(dim, points, masses, "custom")
    }

    pub fn total_variation(&self) -> f64 {
        self.masses.iter().map(|m| m.norm()).sum()
    }

    pub fn total_mass(&self) -> Complex64 {
        self.masses.iter().sum()
    }

    /// `max ρ(x)` over the support.
    pub fn support_radius(&self, dil: &DilationGroup<f64>) -> f64 {
        self.points.iter().map(|p| dil.rho(p)).fold(0.0, f64::max)
    }

    /// `m̂(ξ) = Σ_k m_k e^{−iξ·x_k}`.
    pub fn fourier(&self, xi: &[f64]) -> Complex64 {
        self.points
            .iter()
            .zip(&self.masses)
            .map(|(p, m)| {
                let ph: f64 = p.iter().zip(xi).map(|(a, b)| a * b).sum();
                m * Complex64::new(0.0, -ph).exp()
            })
            .sum()
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        for m in &mut out.masses {
            *m *= a;
        }
        out
    }

    /// Reflected conjugate measure `m̃(A) = conj m(−A)`.
    pub fn reflected_conj(&self) -> Self {
        Self {
            dim: self.dim,
            points: self.points.iter().map(|p| p.iter().map(|v| -v).collect()).collect(),
            masses: self.masses.iter().map(|m| m.conj()).collect(),
            label: format!("{}~", self.label),
        }
    }
}

/// Angular factor `Ω(t)` of a curve measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Angular {
    /// `Ω ≡ 1`.
    Even,
    /// `Ω(t) = sign t`, which makes the total mass vanish.
    Odd,
}

/// Smooth bump on `[1/2, 4]`, identically 1 on `[1, 2]`.
pub fn bump_psi(t: f64) -> f64 {
    fn step(u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        let a = (-1.0 / u).exp();
        let b = (-1.0 / (1.0 - u)).exp();
        a / (a + b)
    }
    if t <= 0.5 || t >= 4.0 {
        0.0
    } else if t < 1.0 {
        step((t - 0.5) / 0.5)
    } else if t <= 2.0 {
        1.0
    } else {
        step((4.0 - t) / 2.0)
    }
}

pub const MIN_CURVE_NODES: usize = 64;

/// Pushforward of `Ω(t)ψ(|t|)/|t| dt` under `γ(t) = (t, t², …, t^d)`, by the
/// trapezoidal rule with `nodes` intervals on each half-line piece, normalized
/// to total variation 1.
pub fn radon_curve_measure(degree: usize, angular: Angular, nodes: usize) -> Result<DiscreteMeasure> {
    if degree == 0 {
        return invalid("curve degree must be at least 1");
    }
    if nodes < MIN_CURVE_NODES {
        return invalid(format!("curve quadrature needs at least {MIN_CURVE_NODES} nodes, got {nodes}"));
    }
    let dt = 3.5 / nodes as f64;
    let mut points = Vec::with_capacity(2 * nodes);
    let mut masses = Vec::with_capacity(2 * nodes);
    for sign in [-1.0, 1.0] {
        for i in 1..nodes {
            let a = 0.5 + i as f64 * dt;
            let t = sign * a;
            let omega = match angular {
                Angular::Even => 1.0,
                Angular::Odd => sign,
            };
            let w = omega * bump_psi(a) / a * dt;
            if w != 0.0 {
                points.push((1..=degree).map(|j| t.powi(j as i32)).collect());
                masses.push(Complex64::new(w, 0.0));
            }
        }
    }
    let tv: f64 = masses.iter().map(|m| m.norm()).sum();
    for m in &mut masses {
        *m /= tv;
    }
    let label = format!("curve:d={degree}:{angular:?}").to_lowercase();
    DiscreteMeasure::new(degree, points, masses, &label)
}

/// `T(s)f(x) = Σ_k m_k f(x − δ_{2^s} x_k)`, with dilated points snapped to the
/// nearest lattice site and coincident snaps merged.
#[derive(Debug)]
pub struct MeasureFamily {
    space: Arc<HomogeneousSpace>,
    measure: DiscreteMeasure,
    scales: RangeInclusive<i32>,
    stencils: Vec<Arc<Stencil>>,
    collisions: Vec<f64>,
    c_o: f64,
    /// Largest `ρ(snapped offset) / 2^s` over the scale range.
    reach: f64,
}

/// Fraction of quadrature points lost to merging above which a scale is flagged.
pub const COLLISION_LIMIT: f64 = 0.5;

impl MeasureFamily {
    pub fn new(space: Arc<HomogeneousSpace>, measure: DiscreteMeasure, scales: RangeInclusive<i32>) -> Result<Self> {
        let g = match space.grid() {
            Some(g) => g,
            None => return invalid("measure families need a grid space"),
        };
        if g.dim() != measure.dim {
            return invalid(format!("measure lives in R^{} but the grid has dimension {}", measure.dim, g.dim()));
        }
        if scales.is_empty() {
            return invalid("empty scale range");
        }
        let mut stencils = Vec::new();
        let mut collisions = Vec::new();
        let mut reach = measure.support_radius(&g.dilations);
        for s in scales.clone() {
            let t = 2f64.powi(s);
            let entries: Vec<(Vec<i64>, Complex64)> = measure
                .points
                .iter()
                .zip(&measure.masses)
                .map(|(p, &m)| {
                    let v = g.dilations.dilate(t, p).iter().map(|x| (x / g.step).round() as i64).collect();
                    (v, m)
                })
                .collect();
            let st = Stencil::from_entries(g.dim(), entries);
            let distinct = st.len().max(1) as f64;
            collisions.push(1.0 - distinct / measure.points.len() as f64);
            for k in 0..st.len() {
                reach = reach.max(g.offset_rho(st.offset(k)) / t);
            }
            stencils.push(Arc::new(st));
        }
        let c_o = pow2_ceil(space.c_d() * (1.0 + reach));
        Ok(Self { space, measure, scales, stencils, collisions, c_o, reach })
    }

    /// Replaces the computed localization constant, e.g. to test a declared value.
    pub fn with_declared_c_o(mut self, c_o: f64) -> Self {
        self.c_o = c_o;
        self
    }

    pub fn measure(&self) -> &DiscreteMeasure {
        &self.measure
    }

    pub fn reach(&self) -> f64 {
        self.reach
    }

    /// Merged fraction of quadrature points at scale `s`.
    pub fn collision_ratio(&self, s: i32) -> f64 {
        self.index(s).map(|i| self.collisions[i]).unwrap_or(0.0)
    }

    /// Scales whose collision ratio exceeds [`COLLISION_LIMIT`].
    pub fn flagged_scales(&self) -> Vec<i32> {
        self.scales.clone().filter(|&s| self.collision_ratio(s) > COLLISION_LIMIT).collect()
    }

    /// Snapped offsets and merged masses at scale `s`.
    pub fn snapped(&self, s: i32) -> Vec<(Vec<i64>, Complex64)> {
        match self.index(s) {
            Some(i) => {
                let st = &self.stencils[i];
                (0..st.len()).map(|k| (st.offset(k).to_vec(), st.coeffs[k])).collect()
            }
            None => Vec::new(),
        }
    }

    /// Total variation of the snapped stencil at scale `s`.
    pub fn snapped_variation(&self, s: i32) -> f64 {
        self.index(s).map(|i| self.stencils[i].coeffs.iter().map(|c| c.norm()).sum()).unwrap_or(0.0)
    }

    fn index(&self, s: i32) -> Option<usize> {
        if self.scales.contains(&s) {
            Some((s - self.scales.start()) as usize)
        } else {
            None
        }
    }
}

impl SingleScaleFamily for MeasureFamily {
    fn space(&self) -> &Arc<HomogeneousSpace> {
        &self.space
    }
    fn scales(&self) -> RangeInclusive<i32> {
        self.scales.clone()
    }
    fn apply(&self, s: i32, f: &GridFunction) -> GridFunction {
        match self.index(s) {
            Some(i) => self.stencils[i].apply(self.space.grid().expect("grid"), f),
            None => GridFunction::zeros(f.len()),
        }
    }
    fn c_o(&self) -> f64 {
        self.c_o
    }
    fn describe(&self) -> String {
        format!("measure:{}", self.measure.label)
    }
    fn adjoint(&self) -> Family {
        Arc::new(Self {
            space: self.space.clone(),
            measure: self.measure.reflected_conj(),
            scales: self.scales.clone(),
            stencils: self.stencils.iter().map(|s| Arc::new(s.adjoint())).collect(),
            collisions: self.collisions.clone(),
            c_o: self.c_o,
            reach: self.reach,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_grid_space, GridSpec};

    #[test]
    fn point_mass_is_identity() {
        let s = Arc::new(build_grid_space(&GridSpec::new(vec![1.0, 2.0], 0.25, vec![2.0, 2.0])).unwrap());
        let fam = MeasureFamily::new(s.clone(), DiscreteMeasure::point_mass(2), -2..=2).unwrap();
        let f = GridFunction::from_real((0..s.len()).map(|i| (i as f64).sin()).collect());
        for sc in -2..=2 {
            assert_eq!(fam.apply(sc, &f), f);
        }
        assert_eq!(fam.c_o(), 1.0);
    }

    #[test]
    fn odd_curve_has_zero_mass() {
        let m = radon_curve_measure(2, Angular::Odd, 2048).unwrap();
        assert!(m.total_mass().norm() < 1e-10);
        assert!((m.total_variation() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn even_curve_has_mass() {
        let m = radon_curve_measure(2, Angular::Even, 2048).unwrap();
        assert!(m.total_mass().re > 0.99);
    }

    #[test]
    fn coarse_quadrature_rejected() {
        assert!(radon_curve_measure(2, Angular::Even, 8).is_err());
    }

    #[test]
    fn bump_profile() {
        assert_eq!(bump_psi(0.5), 0.0);
        assert_eq!(bump_psi(1.5), 1.0);
        assert_eq!(bump_psi(4.0), 0.0);
        assert!(bump_psi(0.75) > 0.0 && bump_psi(0.75) < 1.0);
    }

    #[test]
    fn circle_is_a_spherical_average() {
        let s = Arc::new(build_grid_space(&GridSpec::new(vec![1.0, 1.0], 1.0, vec![40.0, 40.0])).unwrap());
        let m = DiscreteMeasure::circle(512).unwrap();
        let fam = MeasureFamily::new(s.clone(), m.clone(), 0..=4).unwrap();
        let o = s.origin();
        let g = s.grid().unwrap();
        // f(x) = x_1² + x_2², so the average over the circle of radius 16 around 0 is 256.
        let f = GridFunction::from_real((0..s.len()).map(|i| g.position(i).iter().map(|v| v * v).sum()).collect());
        let out = fam.apply(4, &f).get(o).re;
        assert!((out - 256.0).abs() / 256.0 < 0.05, "{out}");
        // Direct quadrature oracle with the same snapping.
        let oracle: f64 =
            fam.snapped(4).iter().map(|(v, c)| c.re * v.iter().map(|k| (*k as f64).powi(2)).sum::<f64>()).sum();
        assert!((out - oracle).abs() < 1e-9);
    }
}
