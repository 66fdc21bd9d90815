//! End-to-end checks: Calderón–Zygmund decomposition, stopping forms, the
//! sparse-domination ratio harness, weight constants and the sharpness sweep.

mod cz;
mod forms;
mod inputs;
mod sharpness;
mod sparse;
mod weights;

pub use cz::{check_stopping_cover, cz_decompose, stopping_norm, CzDecomposition, StoppingNorm};
pub use forms::{stopping_form, stopping_form_max, telescoping_check, TelescopeReport};
pub use inputs::{generate, random_open_set, FunctionKind, SPIKE_HEIGHT};
pub use sharpness::{
    parabola_arc, parabola_arc_family, sharpness_oracle, sharpness_sweep, SharpnessRow, SharpnessSweep, ARC,
    HIGH_QUANTILE,
};
pub use sparse::{
    summarize, verify_sparse_linear, verify_sparse_maximal, write_verdicts, BatchSummary, SparseCase, SparseVerdict,
};
pub use weights::{weight_constants, weighted_bound, weighted_exponent, weighted_norm_sample, WeightRecord};
