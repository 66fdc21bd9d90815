use std::ops::RangeInclusive;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng as _;

use super::family::{pow2_ceil, Family, SingleScaleFamily, Stencil, StencilCache};
use crate::error::{invalid, Error, Result};
use crate::function::GridFunction;
use crate::seeding;
use crate::space::{HomogeneousSpace, Mode};

/// Calderón–Zygmund kernels available to [`CzFamily`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    /// `K(x,y) = 1/(x − y)` on a one-dimensional grid.
    Hilbert,
    /// `K(x,y) = 1/V(x,y)` with `V(x,y) = |B(x, d(x,y))|`.
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CzKernel {
    pub kind: KernelKind,
    /// Exponent `ε` of the modulus `ω(t) = t^ε`.
    pub modulus_exponent: f64,
}

impl CzKernel {
    pub fn hilbert() -> Self {
        Self { kind: KernelKind::Hilbert, modulus_exponent: 1.0 }
    }

    pub fn flat() -> Self {
        Self { kind: KernelKind::Flat, modulus_exponent: 1.0 }
    }
}

/// `T(s)f(x) = Σ_{2^s ≤ d(x,y) < 2^{s+1}} K(x,y) f(y) μ_y`.
#[derive(Debug)]
pub struct CzFamily {
    space: Arc<HomogeneousSpace>,
    kernel: CzKernel,
    scales: RangeInclusive<i32>,
    adjoint: bool,
    cache: StencilCache,
    /// Cloud mode: `V(x, d(x,y))` in row-major order.
    cloud_v: Option<Arc<Vec<f64>>>,
}

impl CzFamily {
    pub fn new(space: Arc<HomogeneousSpace>, kernel: CzKernel) -> Result<Self> {
        let lo = space.min_separation().log2().floor() as i32;
        let hi = space.top_scale();
        Self::with_scales(space, kernel, lo..=hi)
    }

    pub fn with_scales(space: Arc<HomogeneousSpace>, kernel: CzKernel, scales: RangeInclusive<i32>) -> Result<Self> {
        if kernel.kind == KernelKind::Hilbert {
            match space.grid() {
                Some(g) if g.dim() == 1 => {}
                _ => return invalid("the Hilbert kernel needs a one-dimensional grid"),
            }
        }
        let cloud_v = match space.mode() {
            Mode::Cloud => Some(Arc::new(cloud_volumes(&space))),
            Mode::Grid => None,
        };
        Ok(Self { space, kernel, scales, adjoint: false, cache: StencilCache::default(), cloud_v })
    }

    pub fn kernel(&self) -> CzKernel {
        self.kernel
    }

    /// `K(x,y)`, or `conj K(y,x)` for the adjoint family.
    pub fn eval(&self, x: usize, y: usize) -> Complex64 {
        let (a, b) = if self.adjoint { (y, x) } else { (x, y) };
        let k = self.raw(a, b);
        if self.adjoint {
            k.conj()
        } else {
            k
        }
    }

    fn raw(&self, x: usize, y: usize) -> Complex64 {
        if x == y {
            return Complex64::new(0.0, 0.0);
        }
        match self.kernel.kind {
            KernelKind::Hilbert => {
                let g = self.space.grid().expect("grid");
                Complex64::new(1.0 / ((g.coords(x)[0] - g.coords(y)[0]) as f64 * g.step), 0.0)
            }
            KernelKind::Flat => Complex64::new(1.0 / self.volume(x, y), 0.0),
        }
    }

    /// `V(x,y)`; on grids the interior value, so the kernel is translation invariant.
    pub fn volume(&self, x: usize, y: usize) -> f64 {
        match &self.cloud_v {
            Some(v) => v[x * self.space.len() + y],
            None => {
                let d = self.space.dist(x, y);
                self.space.shape(d).count() as f64 * self.space.weight(0)
            }
        }
    }

    fn stencil(&self, s: i32) -> Arc<Stencil> {
        self.cache.get_or(s, || {
            let g = self.space.grid().expect("grid");
            let lo = 2f64.powi(s);
            let shape = self.space.shape(2.0 * lo);
            let w = self.space.weight(0);
            let mut entries = Vec::new();
            for v in shape.offsets.chunks(g.dim()) {
                let d = g.offset_rho(v);
                if d < lo {
                    continue;
                }
                let k = match self.kernel.kind {
                    KernelKind::Hilbert => 1.0 / (v[0] as f64 * g.step),
                    KernelKind::Flat => 1.0 / (self.space.shape(d).count() as f64 * w),
                };
                entries.push((v.to_vec(), Complex64::new(k * w, 0.0)));
            }
            let st = Stencil::from_entries(g.dim(), entries);
            if self.adjoint {
                st.adjoint()
            } else {
                st
            }
        })
    }

    /// Size and regularity constants `C_T` and `A` over `samples` random pairs:
    /// `|K(x,y)| ≤ C_T / V(x,y)` and
    /// `|K(x,y) − K(x',y)| ≤ A ω(d(x,x')/d(x,y)) / V(x,y)` for `d(x,x') ≤ d(x,y)/2`.
    pub fn check_kernel(&self, samples: usize, seed: u64) -> Result<KernelReport> {
        let n = self.space.len();
        let mut rng = seeding::stream(seed, 0xc2);
        let mut c_t: f64 = 0.0;
        let mut a: f64 = 0.0;
        for _ in 0..samples {
            let (x, y) = (rng.random_range(0..n), rng.random_range(0..n));
            if x == y {
                continue;
            }
            let k = self.eval(x, y);
            if !(k.re.is_finite() && k.im.is_finite()) {
                return Err(Error::NonFinite(format!("K({x}, {y})")));
            }
            let v = self.volume(x, y);
            c_t = c_t.max(k.norm() * v);
            let d = self.space.dist(x, y);
            let near = self.space.members_within(x, d / 2.0);
            let x2 = near[rng.random_range(0..near.len())];
            if x2 != x && x2 != y {
                let t = self.space.dist(x, x2) / d;
                let diff = (k - self.eval(x2, y)).norm() * v;
                a = a.max(diff / t.powf(self.kernel.modulus_exponent));
            }
        }
        Ok(KernelReport { c_t, a })
    }
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct KernelReport {
    pub c_t: f64,
    pub a: f64,
}

fn cloud_volumes(space: &HomogeneousSpace) -> Vec<f64> {
    let n = space.len();
    let mut out = vec![0.0; n * n];
    for x in 0..n {
        let mut row: Vec<(f64, usize)> = (0..n).map(|y| (space.dist(x, y), y)).collect();
        row.sort_by(|a, b| a.0.total_cmp(&b.0));
        // Strict ball: points at distance exactly d are excluded.
        let mut acc = 0.0;
        let mut i = 0;
        while i < n {
            let d = row[i].0;
            let mut j = i;
            while j < n && row[j].0 == d {
                out[x * n + row[j].1] = acc;
                j += 1;
            }
            for item in &row[i..j] {
                acc += space.weight(item.1);
            }
            i = j;
        }
    }
    out
}

impl SingleScaleFamily for CzFamily {
    fn space(&self) -> &Arc<HomogeneousSpace> {
        &self.space
    }

    fn scales(&self) -> RangeInclusive<i32> {
        self.scales.clone()
    }

    fn apply(&self, s: i32, f: &GridFunction) -> GridFunction {
        if !self.scales.contains(&s) {
            return GridFunction::zeros(f.len());
        }
        match self.space.grid() {
            Some(g) => self.stencil(s).apply(g, f),
            None => {
                let n = self.space.len();
                let (lo, hi) = (2f64.powi(s), 2f64.powi(s + 1));
                let mut out = GridFunction::zeros(n);
                for y in f.support() {
                    let fy = f.get(y) * self.space.weight(y);
                    for x in 0..n {
                        let d = self.space.dist(x, y);
                        if d >= lo && d < hi {
                            let v = out.get(x) + self.eval(x, y) * fy;
                            out.set(x, v);
                        }
                    }
                }
                out
            }
        }
    }

    fn c_o(&self) -> f64 {
        pow2_ceil(2.0 * self.space.c_d() * 2.0)
    }

    fn describe(&self) -> String {
        format!("cz:{:?}{}", self.kernel.kind, if self.adjoint { ":adjoint" } else { "" }).to_lowercase()
    }

    fn adjoint(&self) -> Family {
        Arc::new(Self {
            space: self.space.clone(),
            kernel: self.kernel,
            scales: self.scales.clone(),
            adjoint: !self.adjoint,
            cache: StencilCache::default(),
            cloud_v: self.cloud_v.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_grid_space, GridSpec};

    fn line(e: f64) -> Arc<HomogeneousSpace> {
        Arc::new(build_grid_space(&GridSpec::new(vec![1.0], 1.0, vec![e])).unwrap())
    }

    #[test]
    fn hilbert_point_mass_matches_direct_sum() {
        let s = line(64.0);
        let fam = CzFamily::new(s.clone(), CzKernel::hilbert()).unwrap();
        let o = s.origin();
        let f = GridFunction::indicator(s.len(), &[o]);
        let out = fam.apply(2, &f);
        for x in 0..s.len() {
            let k = x as i64 - o as i64;
            let expect = if (4..8).contains(&k.abs()) { 1.0 / k as f64 } else { 0.0 };
            assert_eq!(out.get(x).re, expect, "x = {k}");
        }
    }

    #[test]
    fn constant_input_cancels_in_interior() {
        let s = line(64.0);
        let fam = CzFamily::new(s.clone(), CzKernel::hilbert()).unwrap();
        let out = fam.apply(3, &GridFunction::constant(s.len(), 1.0));
        assert!(out.get(s.origin()).norm() < 1e-15);
    }

    #[test]
    fn hilbert_size_constant() {
        let s = line(256.0);
        let fam = CzFamily::new(s, CzKernel::hilbert()).unwrap();
        let r = fam.check_kernel(500, 3).unwrap();
        assert!(r.c_t <= 2.0 + 1e-12 && r.c_t > 1.5, "{r:?}");
        assert!(r.a.is_finite());
    }

    #[test]
    fn hilbert_rejected_in_two_dimensions() {
        let s = Arc::new(build_grid_space(&GridSpec::new(vec![1.0, 1.0], 1.0, vec![4.0, 4.0])).unwrap());
        assert!(CzFamily::new(s, CzKernel::hilbert()).is_err());
    }
}
