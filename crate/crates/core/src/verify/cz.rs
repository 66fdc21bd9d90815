use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::function::GridFunction;
use crate::space::{Ball, HomogeneousSpace};

/// `‖h‖_{p,(L,B)}` with the bound `⟨h1_E⟩_{p,c_oL} ≤ C‖h‖_{p,(L,B)}` measured.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct StoppingNorm {
    pub value: f64,
    /// `‖h1_{c_oL∖E}‖_∞`.
    pub outside: f64,
    /// `sup_B ⟨h⟩_{p,B}`.
    pub inside: f64,
    /// `⟨h1_E⟩_{p,c_oL} / ‖h‖_{p,(L,B)}` (0 when the norm vanishes).
    pub local_ratio: f64,
}

pub(crate) fn union_mask(n: usize, balls: &[Ball]) -> Vec<bool> {
    let mut e = vec![false; n];
    for b in balls {
        for &x in b.members() {
            e[x] = true;
        }
    }
    e
}

pub fn stopping_norm(
    space: &HomogeneousSpace,
    h: &GridFunction,
    l: &Ball,
    c_o: f64,
    balls: &[Ball],
    p: f64,
) -> StoppingNorm {
    let e = union_mask(space.len(), balls);
    let wide = space.members_within(l.center(), c_o * l.radius());
    let outside = wide.iter().filter(|&&x| !e[x]).map(|&x| h.get(x).norm()).fold(0.0, f64::max);
    let inside = balls.iter().map(|b| h.avg_p(space, p, b.members())).fold(0.0, f64::max);
    let value = outside + inside;
    let on_e = h.restrict_mask(&e).avg_p(space, p, &wide);
    let local_ratio = if value > 0.0 { on_e / value } else { 0.0 };
    StoppingNorm { value, outside, inside, local_ratio }
}

/// `h = g + Σ_B b_B` with `b_B = hφ_B − (⨍_B hφ_B)1_B`.
#[derive(Debug, Clone)]
pub struct CzDecomposition {
    pub good: GridFunction,
    /// `(ball index, sparse b_B)`, only for balls where `hφ_B ≠ 0`.
    pub bad: Vec<(usize, Vec<(usize, Complex64)>)>,
    /// `max |h − g − Σ b_B| / max |h|`.
    pub reconstruction_error: f64,
    /// `max_B |∫ b_B| / ‖b_B‖₁`.
    pub mean_defect: f64,
    pub supported: bool,
    /// `‖g‖_∞ / ‖h‖_{p,(L,B)}`.
    pub good_constant: f64,
    /// `sup_B ⟨b_B⟩_{p,B} / ‖h‖_{p,(L,B)}`.
    pub bad_constant: f64,
    pub norm: StoppingNorm,
}

/// Checks `r_B ≤ r_L/2` and `B ⊂ qL` for every ball meeting `c_oL`.
pub fn check_stopping_cover(space: &HomogeneousSpace, l: &Ball, c_o: f64, q: f64, balls: &[Ball]) -> Result<()> {
    let near = union_mask(space.len(), &[space.ball_scaled(l.center(), l.scale(), l.factor() * c_o)]);
    for (id, b) in balls.iter().enumerate() {
        if !b.members().iter().any(|&x| near[x]) {
            continue;
        }
        if b.radius() > l.radius() / 2.0 {
            return Err(Error::Check(format!(
                "ball {id} has radius {} above half of r_L = {}",
                b.radius(),
                l.radius()
            )));
        }
        let far = b.members().iter().map(|&x| space.dist(x, l.center())).fold(0.0, f64::max);
        if far >= q * l.radius() {
            return Err(Error::Check(format!("ball {id} leaves qL")));
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn cz_decompose(
    space: &HomogeneousSpace,
    h: &GridFunction,
    l: &Ball,
    c_o: f64,
    q: f64,
    balls: &[Ball],
    phi: &[Vec<(usize, f64)>],
    p: f64,
) -> Result<CzDecomposition> {
    check_stopping_cover(space, l, c_o, q, balls)?;
    if phi.len() != balls.len() {
        return Err(Error::InvalidParameter(format!("{} bumps for {} balls", phi.len(), balls.len())));
    }
    let norm = stopping_norm(space, h, l, c_o, balls, p);
    let w = space.weights();
    let mut good = h.clone();
    let mut bad = Vec::new();
    let mut supported = true;
    let mut mean_defect: f64 = 0.0;
    let mut bad_sup: f64 = 0.0;
    for (id, (b, bump)) in balls.iter().zip(phi).enumerate() {
        let hphi: Vec<(usize, Complex64)> =
            bump.iter().map(|&(x, v)| (x, h.get(x) * v)).filter(|(_, v)| v.norm() > 0.0).collect();
        if hphi.is_empty() {
            continue;
        }
        supported &= hphi.iter().all(|&(x, _)| b.contains(x));
        let mean: Complex64 = hphi.iter().map(|&(x, v)| v * w[x]).sum::<Complex64>() / b.measure();
        let mut piece: Vec<(usize, Complex64)> = b.members().iter().map(|&x| (x, -mean)).collect();
        for &(x, v) in &hphi {
            if let Ok(i) = piece.binary_search_by_key(&x, |e| e.0) {
                piece[i].1 += v;
            } else {
                supported = false;
            }
        }
        let l1: f64 = piece.iter().map(|&(x, v)| v.norm() * w[x]).sum();
        let integral: Complex64 = piece.iter().map(|&(x, v)| v * w[x]).sum();
        if l1 > 0.0 {
            mean_defect = mean_defect.max(integral.norm() / l1);
        }
        let sum_p: f64 = piece.iter().map(|&(x, v)| v.norm().powf(p) * w[x]).sum();
        bad_sup = bad_sup.max((sum_p / b.measure()).powf(1.0 / p));
        for &(x, v) in &piece {
            let g = good.get(x) - v;
            good.set(x, g);
        }
        bad.push((id, piece));
    }
    // Reassemble independently of the subtraction order above.
    let mut rebuilt = good.clone();
    for (_, piece) in &bad {
        for &(x, v) in piece {
            rebuilt.set(x, rebuilt.get(x) + v);
        }
    }
    let scale = h.abs().into_iter().fold(0.0, f64::max);
    let err = rebuilt.sub(h).abs().into_iter().fold(0.0, f64::max);
    let reconstruction_error = if scale > 0.0 { err / scale } else { err };
    let ratio = |v: f64| if norm.value > 0.0 { v / norm.value } else { 0.0 };
    let good_sup = good.abs().into_iter().fold(0.0, f64::max);
    Ok(CzDecomposition {
        good_constant: ratio(good_sup),
        bad_constant: ratio(bad_sup),
        good,
        bad,
        reconstruction_error,
        mean_defect,
        supported,
        norm,
    })
}
