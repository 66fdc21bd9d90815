use std::collections::HashMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use crate::function::GridFunction;
use crate::space::{GridMeta, HomogeneousSpace};

/// Scale-indexed linear operators `T(s)` acting on functions over one space.
pub trait SingleScaleFamily: Send + Sync + fmt::Debug {
    fn space(&self) -> &Arc<HomogeneousSpace>;
    /// Scales at which `T(s)` is defined; zero elsewhere.
    fn scales(&self) -> RangeInclusive<i32>;
    fn apply(&self, s: i32, f: &GridFunction) -> GridFunction;
    /// Localization constant: `supp T(s)[f 1_L] ⊂ c_o L` whenever `2^s ≤ r_L`.
    fn c_o(&self) -> f64;
    fn describe(&self) -> String;
    fn adjoint(&self) -> Family;
}

pub type Family = Arc<dyn SingleScaleFamily>;

/// `T_σ^τ f = Σ_{σ ≤ s < τ} T(s) f`, zero when `σ ≥ τ`.
pub fn truncate(family: &dyn SingleScaleFamily, sigma: i32, tau: i32, f: &GridFunction) -> GridFunction {
    let mut out = GridFunction::zeros(f.len());
    let range = family.scales();
    for s in sigma.max(*range.start())..tau.min(range.end() + 1) {
        out.add_assign(&family.apply(s, f));
    }
    out
}

/// `sup_{σ ≤ s < τ} |T(s) f|`, zero when `σ ≥ τ`.
pub fn maximal(family: &dyn SingleScaleFamily, sigma: i32, tau: i32, f: &GridFunction) -> Vec<f64> {
    let mut out = vec![0.0f64; f.len()];
    let range = family.scales();
    for s in sigma.max(*range.start())..tau.min(range.end() + 1) {
        for (o, v) in out.iter_mut().zip(family.apply(s, f).values()) {
            *o = o.max(v.norm());
        }
    }
    out
}

/// Translation-invariant grid operator `f ↦ Σ_k c_k f(· − v_k)`.
#[derive(Debug, Clone, Default)]
pub(crate) struct Stencil {
    pub dim: usize,
    /// Lattice offsets `v_k`, flattened.
    pub offsets: Vec<i64>,
    pub coeffs: Vec<Complex64>,
}

impl Stencil {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn offset(&self, k: usize) -> &[i64] {
        &self.offsets[k * self.dim..(k + 1) * self.dim]
    }

    /// Merges repeated offsets and drops zero coefficients.
    pub fn from_entries(dim: usize, mut entries: Vec<(Vec<i64>, Complex64)>) -> Self {
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out = Stencil { dim, ..Default::default() };
        let mut i = 0;
        while i < entries.len() {
            let mut c = Complex64::new(0.0, 0.0);
            let mut j = i;
            while j < entries.len() && entries[j].0 == entries[i].0 {
                c += entries[j].1;
                j += 1;
            }
            if c != Complex64::new(0.0, 0.0) {
                out.offsets.extend_from_slice(&entries[i].0);
                out.coeffs.push(c);
            }
            i = j;
        }
        out
    }

    /// Stencil of the adjoint for the inner product `Σ f conj(g) μ`.
    pub fn adjoint(&self) -> Self {
        let entries =
            (0..self.len()).map(|k| (self.offset(k).iter().map(|v| -v).collect(), self.coeffs[k].conj())).collect();
        Self::from_entries(self.dim, entries)
    }

    pub fn apply(&self, g: &GridMeta, f: &GridFunction) -> GridFunction {
        let mut out = GridFunction::zeros(f.len());
        if self.len() == 0 {
            return out;
        }
        let dim = self.dim;
        let reach: Vec<i64> =
            (0..dim).map(|j| (0..self.len()).map(|k| self.offset(k)[j].abs()).max().unwrap_or(0)).collect();
        let deltas: Vec<isize> = (0..self.len())
            .map(|k| self.offset(k).iter().zip(&g.strides).map(|(&v, &st)| v as isize * st as isize).sum())
            .collect();
        let vals = f.values();
        let dst = out.values_mut();
        for y in 0..vals.len() {
            let fy = vals[y];
            if fy == Complex64::new(0.0, 0.0) {
                continue;
            }
            let cy = g.coords(y);
            let interior = (0..dim).all(|j| cy[j].abs() + reach[j] <= g.half[j]);
            if interior {
                for (d, c) in deltas.iter().zip(&self.coeffs) {
                    dst[(y as isize + d) as usize] += c * fy;
                }
            } else {
                'k: for k in 0..self.len() {
                    let v = self.offset(k);
                    for j in 0..dim {
                        if (cy[j] + v[j]).abs() > g.half[j] {
                            continue 'k;
                        }
                    }
                    dst[(y as isize + deltas[k]) as usize] += self.coeffs[k] * fy;
                }
            }
        }
        out
    }
}

/// Per-scale stencil cache shared by the grid families.
#[derive(Default)]
pub(crate) struct StencilCache {
    map: Mutex<HashMap<i32, Arc<Stencil>>>,
}

impl StencilCache {
    pub fn get_or(&self, s: i32, build: impl FnOnce() -> Stencil) -> Arc<Stencil> {
        if let Some(st) = self.map.lock().expect("stencil cache").get(&s) {
            return st.clone();
        }
        let st = Arc::new(build());
        self.map.lock().expect("stencil cache").entry(s).or_insert(st).clone()
    }
}

impl fmt::Debug for StencilCache {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("StencilCache")
    }
}

/// `T(s) = I` at every scale in the range.
#[derive(Debug, Clone)]
pub struct IdentityFamily {
    space: Arc<HomogeneousSpace>,
    scales: RangeInclusive<i32>,
}

impl IdentityFamily {
    pub fn new(space: Arc<HomogeneousSpace>, scales: RangeInclusive<i32>) -> Self {
        Self { space, scales }
    }
}

impl SingleScaleFamily for IdentityFamily {
    fn space(&self) -> &Arc<HomogeneousSpace> {
        &self.space
    }
    fn scales(&self) -> RangeInclusive<i32> {
        self.scales.clone()
    }
    fn apply(&self, s: i32, f: &GridFunction) -> GridFunction {
        if self.scales.contains(&s) {
            f.clone()
        } else {
            GridFunction::zeros(f.len())
        }
    }
    fn c_o(&self) -> f64 {
        1.0
    }
    fn describe(&self) -> String {
        "identity".into()
    }
    fn adjoint(&self) -> Family {
        Arc::new(self.clone())
    }
}

/// `T(s) = 0`.
#[derive(Debug, Clone)]
pub struct ZeroFamily {
    space: Arc<HomogeneousSpace>,
    scales: RangeInclusive<i32>,
}

impl ZeroFamily {
    pub fn new(space: Arc<HomogeneousSpace>, scales: RangeInclusive<i32>) -> Self {
        Self { space, scales }
    }
}

impl SingleScaleFamily for ZeroFamily {
    fn space(&self) -> &Arc<HomogeneousSpace> {
        &self.space
    }
    fn scales(&self) -> RangeInclusive<i32> {
        self.scales.clone()
    }
    fn apply(&self, _s: i32, f: &GridFunction) -> GridFunction {
        GridFunction::zeros(f.len())
    }
    fn c_o(&self) -> f64 {
        1.0
    }
    fn describe(&self) -> String {
        "zero".into()
    }
    fn adjoint(&self) -> Family {
        Arc::new(self.clone())
    }
}

/// Smallest power of two that is at least `x`.
pub(crate) fn pow2_ceil(x: f64) -> f64 {
    2f64.powi(x.log2().ceil() as i32).max(1.0)
}
