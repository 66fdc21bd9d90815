use num_complex::Complex64;
use rand::Rng as _;
use rustfft::FftPlanner;

use super::family::{maximal, truncate, SingleScaleFamily};
use super::measure::MeasureFamily;
use crate::function::GridFunction;
use crate::seeding;
use crate::space::{Ball, HomogeneousSpace};
use crate::stats::{fit_line, LinearFit};

/// Uniform random complex values on the members of `ball`, zero elsewhere.
pub fn random_on(space: &HomogeneousSpace, ball: &[usize], rng: &mut seeding::Rng) -> GridFunction {
    let mut f = GridFunction::zeros(space.len());
    for &i in ball {
        f.set(i, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    }
    f
}

fn random_ball(space: &HomogeneousSpace, scales: (i32, i32), rng: &mut seeding::Rng) -> Ball {
    let c = rng.random_range(0..space.len());
    let s = rng.random_range(scales.0..=scales.1);
    space.ball(c, s)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct LocalizationReport {
    pub pass: bool,
    pub declared: f64,
    pub measured: f64,
    /// `(center, s_L, point outside c_o L)` for the first failing trial.
    pub witness: Option<(usize, i32, usize)>,
}

/// Smallest dilate containing `supp T_σ^{s_L}[f 1_L]` over random balls `L`
/// and random `f`, with `σ` the bottom of the family's range.
pub fn check_localization(family: &dyn SingleScaleFamily, trials: usize, seed: u64) -> LocalizationReport {
    let space = family.space().clone();
    let mut rng = seeding::stream(seed, 0x10c);
    let range = family.scales();
    let (lo, hi) = (*range.start(), (*range.end()).min(space.top_scale()));
    let mut measured: f64 = 0.0;
    let mut witness = None;
    for _ in 0..trials {
        let l = random_ball(&space, (lo, hi.max(lo)), &mut rng);
        let f = random_on(&space, l.members(), &mut rng);
        let out = truncate(family, lo, l.scale() + 1, &f);
        for x in out.support() {
            let ratio = space.dist(l.center(), x) / l.radius();
            measured = measured.max(ratio);
            if ratio >= family.c_o() && witness.is_none() {
                witness = Some((l.center(), l.scale(), x));
            }
        }
    }
    // Strict balls: a point at distance t lies in every dilate above t / r.
    LocalizationReport { pass: witness.is_none(), declared: family.c_o(), measured: measured * (1.0 + 1e-12), witness }
}

/// `max |⟨Tf,g⟩ − ⟨f,T*g⟩| / (‖f‖₂‖g‖₂)` over random inputs and scales.
pub fn adjoint_defect(family: &dyn SingleScaleFamily, trials: usize, seed: u64) -> f64 {
    let space = family.space().clone();
    let adj = family.adjoint();
    let mut rng = seeding::stream(seed, 0xad);
    let all: Vec<usize> = (0..space.len()).collect();
    let range = family.scales();
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let s = rng.random_range(*range.start()..=*range.end());
        let f = random_on(&space, &all, &mut rng);
        let g = random_on(&space, &all, &mut rng);
        let lhs = family.apply(s, &f).inner(&space, &g);
        let rhs = f.inner(&space, &adj.apply(s, &g));
        worst = worst.max((lhs - rhs).norm() / (f.norm_p(&space, 2.0) * g.norm_p(&space, 2.0)));
    }
    worst
}

/// `max ‖T(s)(af + bg) − aT(s)f − bT(s)g‖₂ / (|a|‖T(s)f‖₂ + |b|‖T(s)g‖₂)` over random inputs.
pub fn linearity_defect(family: &dyn SingleScaleFamily, trials: usize, seed: u64) -> f64 {
    let space = family.space().clone();
    let mut rng = seeding::stream(seed, 0x11);
    let all: Vec<usize> = (0..space.len()).collect();
    let range = family.scales();
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let s = rng.random_range(*range.start()..=*range.end());
        let f = random_on(&space, &all, &mut rng);
        let g = random_on(&space, &all, &mut rng);
        let a = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let b = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let (tf, tg) = (family.apply(s, &f), family.apply(s, &g));
        let lhs = family.apply(s, &f.scale(a).add(&g.scale(b)));
        let rhs = tf.scale(a).add(&tg.scale(b));
        let scale = a.norm() * tf.norm_p(&space, 2.0) + b.norm() * tg.norm_p(&space, 2.0);
        if scale > 0.0 {
            worst = worst.max(lhs.sub(&rhs).norm_p(&space, 2.0) / scale);
        }
    }
    worst
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct FourierConsistency {
    /// `max_ξ |F[T(s)f](ξ) − m̂(δ_{2^s}ξ) f̂(ξ)| / ‖f̂‖_∞`.
    pub max_error: f64,
    /// `TV(m) · max|ξ| · (snapping radius)`, the a priori bound for the same quantity.
    pub bound: f64,
    pub pass: bool,
}

/// Compares the spatial operator against its Fourier multiplier on a grid,
/// using the periodized DFT with `f` supported far enough inside that no
/// wrap-around occurs.
pub fn fourier_consistency(family: &MeasureFamily, s: i32, f: &GridFunction) -> FourierConsistency {
    let space = family.space();
    let g = space.grid().expect("grid");
    let tf = family.apply(s, f);
    let fh = dft(g.shape.as_slice(), f.values());
    let th = dft(g.shape.as_slice(), tf.values());
    let m = family.measure();
    let dim = g.dim();
    let t = 2f64.powi(s);
    let mut max_err: f64 = 0.0;
    let mut max_xi: f64 = 0.0;
    let fmax = fh.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for idx in 0..fh.len() {
        let k = g.coords(idx);
        // Frequencies for the DFT index centered on the grid origin.
        let xi: Vec<f64> = (0..dim)
            .map(|j| {
                let nj = g.shape[j] as i64;
                let kk = (k[j] + g.half[j]).rem_euclid(nj);
                let signed = if kk > nj / 2 { kk - nj } else { kk };
                std::f64::consts::TAU * signed as f64 / (nj as f64 * g.step)
            })
            .collect();
        let norm_xi = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        max_xi = max_xi.max(norm_xi);
        let dxi: Vec<f64> = g.dilations.dilate(t, &xi);
        let mh = m.fourier(&dxi);
        max_err = max_err.max((th[idx] - mh * fh[idx]).norm());
    }
    let bound = m.total_variation() * max_xi * g.step * (dim as f64).sqrt() / 2.0 * fmax;
    let max_error = if fmax > 0.0 { max_err / fmax } else { 0.0 };
    let bound = if fmax > 0.0 { bound / fmax } else { 0.0 };
    FourierConsistency { max_error, bound, pass: max_error <= bound * (1.0 + 1e-9) + 1e-12 }
}

/// Multi-dimensional DFT with phases relative to the grid origin, row-major
/// layout as in the grid.
fn dft(shape: &[usize], values: &[Complex64]) -> Vec<Complex64> {
    let mut data = values.to_vec();
    let mut planner = FftPlanner::<f64>::new();
    let total = data.len();
    let mut stride = total;
    for &n in shape {
        stride /= n;
        let fft = planner.plan_fft_forward(n);
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let blocks = total / (n * stride);
        for b in 0..blocks {
            for o in 0..stride {
                let base = b * n * stride + o;
                for i in 0..n {
                    // Rotate so index 0 is the lattice origin (entry `half`).
                    line[i] = data[base + ((i + n / 2) % n) * stride];
                }
                fft.process(&mut line);
                for i in 0..n {
                    data[base + ((i + n / 2) % n) * stride] = line[i];
                }
            }
        }
    }
    data
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct UniformBoundReport {
    /// `(τ − σ, max ‖T_σ^τ f‖_p / ‖f‖_p)` per span.
    pub by_span: Vec<(i32, f64)>,
    pub trend: Option<LinearFit>,
}

/// Samples `‖T_σ^τ f‖_p / ‖f‖_p` with `τ` the top of the range and spans
/// given by `spans`.
pub fn uniform_bound_sample(
    family: &dyn SingleScaleFamily,
    p: f64,
    spans: &[i32],
    trials: usize,
    seed: u64,
) -> UniformBoundReport {
    let space = family.space().clone();
    let tau = *family.scales().end() + 1;
    let mut rng = seeding::stream(seed, 0x0b);
    let mut by_span = Vec::new();
    for &span in spans {
        let mut worst: f64 = 0.0;
        for _ in 0..trials {
            let l = space.ball(space.origin(), tau - 2);
            let f = random_on(&space, l.members(), &mut rng);
            let ratio = truncate(family, tau - span, tau, &f).norm_p(&space, p) / f.norm_p(&space, p);
            worst = worst.max(ratio);
        }
        by_span.push((span, worst));
    }
    let x: Vec<f64> = by_span.iter().map(|(s, _)| (*s as f64).log2()).collect();
    let y: Vec<f64> = by_span.iter().map(|(_, r)| *r).collect();
    UniformBoundReport { trend: fit_line(&x, &y), by_span }
}

/// `max ‖T_⋆ f‖_∞ / ‖f‖_∞` over random bounded inputs.
pub fn maximal_linf_ratio(family: &dyn SingleScaleFamily, trials: usize, seed: u64) -> f64 {
    let space = family.space().clone();
    let mut rng = seeding::stream(seed, 0x1f);
    let all: Vec<usize> = (0..space.len()).collect();
    let r = family.scales();
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let f = random_on(&space, &all, &mut rng);
        let m = maximal(family, *r.start(), r.end() + 1, &f);
        worst = worst.max(crate::stats::max(&m) / f.norm_p(&space, f64::INFINITY));
    }
    worst
}
