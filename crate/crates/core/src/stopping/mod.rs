//! Maximal functions, the stopping-time ladder and sparse collections.

mod ladder;
mod maximal;
mod sparse;

pub use ladder::{
    build_stopping_ladder, ladder_constants, HalvingReport, LadderConstants, Level, StoppingConfig, StoppingLadder,
};
pub(crate) use maximal::distinct_scales;
pub use maximal::{local_maximal_fn, maximal_fn};
pub use sparse::{certify_sparse, sparse_form, SparseCollection};
