//! Sparse domination on finite spaces of homogeneous type.
//!
//! The crate builds discretized quasi-metric measure spaces, Whitney covers and
//! stopping-time ladders over them, single-scale operator families, and a
//! harness that compares bilinear forms of truncated operators against sparse
//! forms.

pub mod covering;
pub mod error;
pub mod function;
pub mod improving;
pub mod operators;
pub mod scalar;
pub mod seeding;
pub mod space;
pub mod stats;
pub mod stopping;
pub mod verify;

pub use error::{Error, Result};
pub use function::GridFunction;
pub use scalar::Float;
pub use space::{Ball, HomogeneousSpace};

/// Dilation group over `f64`, the precision used throughout the harness.
pub type Dilations = space::DilationGroup<f64>;
