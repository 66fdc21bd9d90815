//! Small regression and order-statistics helpers shared by the fits.

use statrs::distribution::{ContinuousCDF, StudentsT};

/// Ordinary least-squares line with its coefficient of determination.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub n: usize,
    /// Standard error of the slope; infinite when fewer than three points.
    pub slope_se: f64,
}

impl LinearFit {
    /// A fit is conclusive when its R² reaches 0.8.
    pub fn conclusive(&self) -> bool {
        self.r2 >= 0.8
    }

    /// One-sided p-value for the alternative "slope > 0".
    pub fn p_positive_slope(&self) -> f64 {
        if self.n < 3 || !self.slope_se.is_finite() {
            return 1.0;
        }
        if self.slope_se == 0.0 {
            return if self.slope > 0.0 { 0.0 } else { 1.0 };
        }
        let t = self.slope / self.slope_se;
        match StudentsT::new(0.0, 1.0, (self.n - 2) as f64) {
            Ok(dist) => 1.0 - dist.cdf(t),
            Err(_) => 1.0,
        }
    }
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let e = b - (intercept + slope * a);
            e * e
        })
        .sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    let slope_se = if n > 2 { (sse / (nf - 2.0) / sxx).sqrt() } else { f64::INFINITY };
    Some(LinearFit { slope, intercept, r2, n, slope_se })
}

/// Linear-interpolated quantile, `q` in `[0, 1]`. Returns NaN on empty input.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let w = pos - lo as f64;
    v[lo] * (1.0 - w) + v[hi] * w
}

pub fn median(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}

pub fn max(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}
