use num_complex::Complex64;

use super::cz::union_mask;
use crate::covering::ball_partition;
use crate::error::{invalid, Error, Result};
use crate::function::GridFunction;
use crate::operators::SingleScaleFamily;
use crate::space::{Ball, HomogeneousSpace};
use crate::stopping::StoppingLadder;

/// Sparse partition-of-unity function `(site, value)`.
type Bump = Vec<(usize, f64)>;

fn apply(family: &dyn SingleScaleFamily, s: i32, f: &GridFunction) -> Option<GridFunction> {
    family.scales().contains(&s).then(|| family.apply(s, f))
}

fn sparse_product(n: usize, h: &GridFunction, bump: &[(usize, f64)], mask: Option<&[bool]>) -> GridFunction {
    let mut out = GridFunction::zeros(n);
    for &(x, v) in bump {
        if mask.is_none_or(|m| m[x]) {
            out.set(x, h.get(x) * v);
        }
    }
    out
}

/// `⟨T_σ^{s_L}[h1 1_{L∖E}], h2⟩ + Σ_B ⟨T_{s_B∨σ}^{s_L}[h1 1_L φ_B], h2⟩`.
///
/// The ball sum is regrouped by scale: `U_s = Σ_{s_B∨σ ≤ s} h1 1_L φ_B` and the
/// result is `Σ_{σ≤s<s_L} ⟨T(s)U_s, h2⟩`, which is the same finite sum.
#[allow(clippy::too_many_arguments)]
pub fn stopping_form(
    family: &dyn SingleScaleFamily,
    l: &Ball,
    balls: &[Ball],
    phi: &[Vec<(usize, f64)>],
    sigma: i32,
    h1: &GridFunction,
    h2: &GridFunction,
) -> Result<Complex64> {
    let space = family.space().clone();
    let n = space.len();
    let s_l = l.scale();
    if sigma > s_l {
        return invalid(format!("σ = {sigma} exceeds s_L = {s_l}"));
    }
    let e = union_mask(n, balls);
    let in_l = union_mask(n, std::slice::from_ref(l));
    let outside: Vec<bool> = (0..n).map(|x| in_l[x] && !e[x]).collect();
    let span = (s_l - sigma) as usize;
    let mut buckets = vec![GridFunction::zeros(n); span.max(1)];
    let mut used = vec![false; span.max(1)];
    buckets[0] = h1.restrict_mask(&outside);
    used[0] = true;
    for (b, bump) in balls.iter().zip(phi) {
        let piece = sparse_product(n, h1, bump, Some(&in_l));
        if piece.support().is_empty() {
            continue;
        }
        if b.scale() > s_l {
            return Err(Error::Check(format!("ball at {} has scale {} above s_L = {s_l}", b.center(), b.scale())));
        }
        let start = b.scale().max(sigma);
        if start < s_l {
            let k = (start - sigma) as usize;
            buckets[k].add_assign(&piece);
            used[k] = true;
        }
    }
    let mut acc = GridFunction::zeros(n);
    let mut total = Complex64::new(0.0, 0.0);
    for (k, s) in (sigma..s_l).enumerate() {
        if used[k] {
            acc.add_assign(&buckets[k]);
        }
        if let Some(out) = apply(family, s, &acc) {
            total += out.inner(&space, h2);
        }
    }
    Ok(total)
}

/// `M_a^b f = max_{a≤s<b} |T(s)f|` paired with `h2`.
fn max_pairing(
    family: &dyn SingleScaleFamily,
    space: &HomogeneousSpace,
    a: i32,
    b: i32,
    f: &GridFunction,
    h2: &GridFunction,
) -> Complex64 {
    let mut m = vec![0.0f64; f.len()];
    for s in a..b {
        if let Some(out) = apply(family, s, f) {
            for (o, v) in m.iter_mut().zip(out.values()) {
                *o = o.max(v.norm());
            }
        }
    }
    GridFunction::from_real(m).inner(space, h2)
}

/// Maximal analogue: `⟨M_σ^{s_L∧τ}[h1 1_{L∖E}], h2⟩ + Σ_B ⟨M_{s_B∨σ}^{s_L∧τ}[h1 1_L φ_B], h2⟩`.
#[allow(clippy::too_many_arguments)]
pub fn stopping_form_max(
    family: &dyn SingleScaleFamily,
    l: &Ball,
    balls: &[Ball],
    phi: &[Vec<(usize, f64)>],
    sigma: i32,
    tau: i32,
    h1: &GridFunction,
    h2: &GridFunction,
) -> Result<Complex64> {
    let space = family.space().clone();
    let n = space.len();
    let top = l.scale().min(tau);
    let e = union_mask(n, balls);
    let in_l = union_mask(n, std::slice::from_ref(l));
    let outside: Vec<bool> = (0..n).map(|x| in_l[x] && !e[x]).collect();
    let mut total = max_pairing(family, &space, sigma, top, &h1.restrict_mask(&outside), h2);
    for (b, bump) in balls.iter().zip(phi) {
        let piece = sparse_product(n, h1, bump, Some(&in_l));
        if piece.support().is_empty() {
            continue;
        }
        if b.scale() > l.scale() {
            return Err(Error::Check(format!(
                "ball at {} has scale {} above s_L = {}",
                b.center(),
                b.scale(),
                l.scale()
            )));
        }
        total += max_pairing(family, &space, b.scale().max(sigma), top, &piece, h2);
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TelescopeReport {
    pub lhs_re: f64,
    pub lhs_im: f64,
    pub rhs_re: f64,
    pub rhs_im: f64,
    /// `|lhs − rhs| / max(|lhs|, Σ|terms|, ‖f1‖₁‖f2‖_∞)`; the last term keeps the
    /// scale meaningful when cancellation makes both sides vanish.
    pub rel_error: f64,
    pub forms: usize,
}

/// Compares `⟨T_σ^{s_{B0}} f1, f2⟩` with the sum over levels of the stopping
/// forms `Λ^σ_{(B_k, B_{k+1})}(f1φ_{B_k}, f2)` over `B_k` with `s_{B_k} > σ`,
/// plus the remainder `Σ ⟨T_σ^{s_B}[f1φ_B], f2⟩` over the last level. Level 0
/// uses `L = B0` with `φ = 1_{B0}`, so `f1` must be supported in `B0`.
pub fn telescoping_check(
    family: &dyn SingleScaleFamily,
    ladder: &StoppingLadder,
    sigma: i32,
    f1: &GridFunction,
    f2: &GridFunction,
) -> Result<TelescopeReport> {
    let space = family.space().clone();
    let n = space.len();
    let b0 = &ladder.b0;
    if let Some(x) = f1.support().into_iter().find(|&x| !b0.contains(x)) {
        return invalid(format!("f1 is nonzero at {x} outside B0"));
    }
    let lhs_fn = crate::operators::truncate(family, sigma, b0.scale(), f1);
    let lhs = lhs_fn.inner(&space, f2);

    let covers: Vec<(Vec<Ball>, Vec<Bump>)> = ladder
        .levels
        .iter()
        .enumerate()
        .map(|(k, level)| {
            if k == 0 {
                (vec![b0.clone()], vec![b0.members().iter().map(|&x| (x, 1.0)).collect()])
            } else {
                (level.balls.clone(), ball_partition(&space, &level.balls))
            }
        })
        .collect();
    let mut rhs = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    let mut forms = 0;
    let last = covers.len() - 1;
    for k in 0..last {
        let (balls, phis) = &covers[k];
        let (next, next_phi) = &covers[k + 1];
        for (l, phi_l) in balls.iter().zip(phis) {
            if l.scale() <= sigma {
                continue;
            }
            let h1 = sparse_product(n, f1, phi_l, None);
            if h1.support().is_empty() {
                continue;
            }
            let v = stopping_form(family, l, next, next_phi, sigma, &h1, f2)?;
            rhs += v;
            magnitude += v.norm();
            forms += 1;
        }
    }
    let (balls, phis) = &covers[last];
    for (b, phi_b) in balls.iter().zip(phis) {
        if b.scale() <= sigma {
            continue;
        }
        let h = sparse_product(n, f1, phi_b, None);
        let v = crate::operators::truncate(family, sigma, b.scale(), &h).inner(&space, f2);
        rhs += v;
        magnitude += v.norm();
    }
    let l1: f64 = f1.values().iter().zip(space.weights()).map(|(v, w)| v.norm() * w).sum();
    let sup = f2.abs().into_iter().fold(0.0, f64::max);
    let denom = lhs.norm().max(magnitude).max(l1 * sup);
    let rel_error = if denom > 0.0 { (lhs - rhs).norm() / denom } else { 0.0 };
    Ok(TelescopeReport { lhs_re: lhs.re, lhs_im: lhs.im, rhs_re: rhs.re, rhs_im: rhs.im, rel_error, forms })
}
