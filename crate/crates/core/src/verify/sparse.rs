use std::io::Write;

use crate::error::{invalid, Error, Result};
use crate::function::GridFunction;
use crate::operators::{maximal, truncate, SingleScaleFamily};
use crate::space::Ball;
use crate::stats::{max, median};
use crate::stopping::{build_stopping_ladder, certify_sparse, StoppingConfig};

/// Identification of one harness run.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SparseCase {
    pub scenario: String,
    pub seed: u64,
    pub sigma: i32,
    pub tau: i32,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SparseVerdict {
    pub scenario: String,
    pub seed: u64,
    pub sigma: i32,
    pub tau: i32,
    /// `|⟨T_σ^τ f1, f2⟩|` or its maximal analogue.
    pub pairing: f64,
    pub sparse_form: f64,
    pub ratio: f64,
    pub depth: usize,
    pub zeta: f64,
    pub theta: f64,
    pub c1: f64,
}

#[derive(Clone, Copy)]
enum Side {
    Linear,
    Maximal,
}

fn verify(
    family: &dyn SingleScaleFamily,
    b0: &Ball,
    case: &SparseCase,
    f1: &GridFunction,
    f2: &GridFunction,
    cfg: &StoppingConfig,
    side: Side,
) -> Result<SparseVerdict> {
    if case.sigma >= case.tau {
        return invalid(format!("need σ < τ, got {} and {}", case.sigma, case.tau));
    }
    if case.tau > b0.scale() {
        return invalid(format!("τ = {} exceeds the scale {} of B0", case.tau, b0.scale()));
    }
    let space = family.space().clone();
    let pairing = match side {
        Side::Linear => truncate(family, case.sigma, case.tau, f1).inner(&space, f2).norm(),
        Side::Maximal => GridFunction::from_real(maximal(family, case.sigma, case.tau, f1)).inner(&space, f2).norm(),
    };
    let ladder = build_stopping_ladder(&space, f1, f2, b0, cfg)?;
    let collection = match ladder.collection.clone() {
        Some(c) => c,
        None => certify_sparse(&space, &ladder)?,
    };
    let form = collection.form(&space, f1, f2, cfg.p1, cfg.p2);
    let ratio = if pairing == 0.0 {
        0.0
    } else if form == 0.0 {
        return Err(Error::Check(format!(
            "{} seed {}: pairing {pairing} with a vanishing sparse form",
            case.scenario, case.seed
        )));
    } else {
        pairing / form
    };
    Ok(SparseVerdict {
        scenario: case.scenario.clone(),
        seed: case.seed,
        sigma: case.sigma,
        tau: case.tau,
        pairing,
        sparse_form: form,
        ratio,
        depth: ladder.depth(),
        zeta: collection.zeta,
        theta: ladder.theta,
        c1: collection.c1,
    })
}

/// `|⟨T_σ^τ f1, f2⟩|` against the sparse form of the certified ladder for `(|f1|, |f2|)` below `B0`.
pub fn verify_sparse_linear(
    family: &dyn SingleScaleFamily,
    b0: &Ball,
    case: &SparseCase,
    f1: &GridFunction,
    f2: &GridFunction,
    cfg: &StoppingConfig,
) -> Result<SparseVerdict> {
    verify(family, b0, case, f1, f2, cfg, Side::Linear)
}

/// `|⟨sup_{σ≤s<τ} |T(s)f1|, f2⟩|` against the sparse form.
pub fn verify_sparse_maximal(
    family: &dyn SingleScaleFamily,
    b0: &Ball,
    case: &SparseCase,
    f1: &GridFunction,
    f2: &GridFunction,
    cfg: &StoppingConfig,
) -> Result<SparseVerdict> {
    verify(family, b0, case, f1, f2, cfg, Side::Maximal)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BatchSummary {
    pub count: usize,
    pub max: f64,
    pub median: f64,
    /// `max / median`, infinite when the median vanishes and the max does not.
    pub spread: f64,
}

pub fn summarize(verdicts: &[SparseVerdict]) -> BatchSummary {
    let ratios: Vec<f64> = verdicts.iter().map(|v| v.ratio).collect();
    let (mx, md) = (max(&ratios), median(&ratios));
    let spread = if md > 0.0 {
        mx / md
    } else if mx == 0.0 {
        1.0
    } else {
        f64::INFINITY
    };
    BatchSummary { count: ratios.len(), max: mx, median: md, spread }
}

/// Rows `scenario, seed, sigma, tau, pairing, sparse_form, ratio, depth, zeta, theta`.
pub fn write_verdicts<W: Write>(verdicts: &[SparseVerdict], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scenario", "seed", "sigma", "tau", "pairing", "sparse_form", "ratio", "depth", "zeta", "theta"])?;
    for v in verdicts {
        w.write_record([
            v.scenario.clone(),
            v.seed.to_string(),
            v.sigma.to_string(),
            v.tau.to_string(),
            format!("{:.12e}", v.pairing),
            format!("{:.12e}", v.sparse_form),
            format!("{:.12e}", v.ratio),
            v.depth.to_string(),
            format!("{:.12e}", v.zeta),
            v.theta.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
