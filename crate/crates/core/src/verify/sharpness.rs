use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::function::GridFunction;
use crate::operators::{DiscreteMeasure, MeasureFamily, SingleScaleFamily};
use crate::space::{build_grid_space, GridSpec};
use crate::stats::{fit_line, quantile, LinearFit};

/// Quantile of the nonzero values of `u_δ` taken as its typical size.
pub const HIGH_QUANTILE: f64 = 0.9;

/// Parameter interval of the curve arc `γ(t) = (t, t²)`.
pub const ARC: (f64, f64) = (0.5, 1.0);

fn gamma(t: f64) -> [f64; 2] {
    [t, t * t]
}

/// Midpoint quadrature of `dt` on the arc, pushed forward by `γ`.
pub fn parabola_arc(nodes: usize) -> Result<DiscreteMeasure> {
    if nodes < 16 {
        return invalid("arc quadrature needs at least 16 nodes");
    }
    let (a, b) = ARC;
    let dt = (b - a) / nodes as f64;
    let points = (0..nodes).map(|k| gamma(a + (k as f64 + 0.5) * dt).to_vec()).collect();
    DiscreteMeasure::new(2, points, vec![Complex64::new(dt, 0.0); nodes], "parabola-arc")
}

/// Single-scale family of the arc on the isotropic square grid of step `step`
/// and half-width `half_extent`, with scale 0 only.
pub fn parabola_arc_family(step: f64, half_extent: f64, nodes: usize) -> Result<MeasureFamily> {
    let mut spec = GridSpec::new(vec![1.0, 1.0], step, vec![half_extent]);
    spec.site_budget = spec.site_budget.max(spec.site_count()?);
    let space = Arc::new(build_grid_space(&spec)?);
    MeasureFamily::new(space, parabola_arc(nodes)?, 0..=0)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SharpnessRow {
    pub delta: f64,
    /// High quantile of `u_δ` on its support.
    pub v: f64,
    /// Measure of `{u_δ ≥ v/2}`.
    pub m: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SharpnessSweep {
    pub rows: Vec<SharpnessRow>,
    pub value_fit: LinearFit,
    pub measure_fit: LinearFit,
}

impl SharpnessSweep {
    fn from_rows(rows: Vec<SharpnessRow>) -> Result<Self> {
        let x: Vec<f64> = rows.iter().map(|r| r.delta.ln()).collect();
        let fit = |y: Vec<f64>| fit_line(&x, &y).ok_or_else(|| crate::Error::Check("degenerate sweep".into()));
        let value_fit = fit(rows.iter().map(|r| r.v.ln()).collect())?;
        let measure_fit = fit(rows.iter().map(|r| r.m.ln()).collect())?;
        Ok(Self { rows, value_fit, measure_fit })
    }

    pub fn value_slope(&self) -> f64 {
        self.value_fit.slope
    }

    pub fn measure_slope(&self) -> f64 {
        self.measure_fit.slope
    }

    /// Coefficients `(a, b, n)` of the necessary condition `a + b/p₂′ ≥ n/p₁`
    /// that boundedness `L^{p₁} → L^{p₂′}` imposes on `f_δ` in dimension `n`.
    pub fn induced_line(&self, dim: usize) -> (f64, f64, f64) {
        (self.value_slope(), self.measure_slope(), dim as f64)
    }

    /// Rows `delta,v,m` followed by a `slope` row holding the two fitted slopes.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["delta", "v", "m"])?;
        for r in &self.rows {
            w.write_record([format!("{:.12e}", r.delta), format!("{:.12e}", r.v), format!("{:.12e}", r.m)])?;
        }
        w.write_record([
            "slope".to_string(),
            format!("{:.6}", self.value_slope()),
            format!("{:.6}", self.measure_slope()),
        ])?;
        w.flush()?;
        Ok(())
    }
}

fn row(delta: f64, values: &[f64], cell: f64) -> SharpnessRow {
    let nonzero: Vec<f64> = values.iter().copied().filter(|&u| u > 0.0).collect();
    let v = quantile(&nonzero, HIGH_QUANTILE);
    let m = cell * nonzero.iter().filter(|&&u| u >= v / 2.0).count() as f64;
    SharpnessRow { delta, v, m }
}

fn check_deltas(deltas: &[f64], step: f64) -> Result<()> {
    if deltas.len() < 3 {
        return invalid("the sweep needs at least three values of δ");
    }
    if let Some(&d) = deltas.iter().find(|&&d| !(d >= 4.0 * step)) {
        return invalid(format!("δ = {d} is below four grid steps ({step})"));
    }
    Ok(())
}

/// `u_δ = T(0) 1_{B(0,δ)}` for each `δ`, with `v(δ)`, `m(δ)` and their log-log slopes.
pub fn sharpness_sweep(family: &MeasureFamily, deltas: &[f64]) -> Result<SharpnessSweep> {
    let space = family.space().clone();
    let Some(grid) = space.grid() else {
        return invalid("the sweep needs a grid space");
    };
    if !family.scales().contains(&0) {
        return invalid("the sweep uses scale 0, which the family does not have");
    }
    check_deltas(deltas, grid.step)?;
    let cell = space.weight(space.origin());
    let mut rows = Vec::new();
    for &delta in deltas {
        let ball = space.members_within(space.origin(), delta);
        let u = family.apply(0, &GridFunction::indicator(space.len(), &ball));
        rows.push(row(delta, &u.abs(), cell));
    }
    SharpnessSweep::from_rows(rows)
}

/// Exact `|{t ∈ ARC : |x − γ(t)| < δ}|`, found from the sign changes of the
/// quartic `|x − γ(t)|² − δ²` on a fine partition of the relevant `t` range.
fn tube_length(x: [f64; 2], delta: f64) -> f64 {
    let lo = ARC.0.max(x[0] - delta);
    let hi = ARC.1.min(x[0] + delta);
    if lo >= hi {
        return 0.0;
    }
    let g = |t: f64| {
        let p = gamma(t);
        (x[0] - p[0]).powi(2) + (x[1] - p[1]).powi(2) - delta * delta
    };
    let root = |mut a: f64, mut b: f64| {
        let ga = g(a) < 0.0;
        for _ in 0..60 {
            let c = 0.5 * (a + b);
            if (g(c) < 0.0) == ga {
                a = c;
            } else {
                b = c;
            }
        }
        0.5 * (a + b)
    };
    const PIECES: usize = 64;
    let dt = (hi - lo) / PIECES as f64;
    let mut total = 0.0;
    let mut start = if g(lo) < 0.0 { Some(lo) } else { None };
    for k in 0..PIECES {
        let (a, b) = (lo + k as f64 * dt, lo + (k + 1) as f64 * dt);
        let (ia, ib) = (g(a) < 0.0, g(b) < 0.0);
        if ia != ib {
            let r = root(a, b);
            match start.take() {
                Some(s) => total += r - s,
                None => start = Some(r),
            }
        }
    }
    if let Some(s) = start {
        total += hi - s;
    }
    total
}

/// Continuum values of `u_δ` sampled on the lattice of step `step`, restricted
/// to the bounding region of the tube around the arc.
pub fn sharpness_oracle(step: f64, deltas: &[f64]) -> Result<SharpnessSweep> {
    check_deltas(deltas, step)?;
    let mut rows = Vec::new();
    for &delta in deltas {
        let mut values = Vec::new();
        let i0 = ((ARC.0 - delta) / step).floor() as i64;
        let i1 = ((ARC.1 + delta) / step).ceil() as i64;
        for i in i0..=i1 {
            let x0 = i as f64 * step;
            let tl = ARC.0.max(x0 - delta);
            let th = ARC.1.min(x0 + delta);
            if tl >= th {
                continue;
            }
            let j0 = ((tl * tl - delta) / step).floor() as i64;
            let j1 = ((th * th + delta) / step).ceil() as i64;
            for j in j0..=j1 {
                values.push(tube_length([x0, j as f64 * step], delta));
            }
        }
        rows.push(row(delta, &values, step * step));
    }
    SharpnessSweep::from_rows(rows)
}
