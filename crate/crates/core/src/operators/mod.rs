//! Single-scale operator families and the checks run against them.

mod checks;
mod cz;
mod family;
mod measure;
mod smoothing;

pub use checks::{
    adjoint_defect, check_localization, fourier_consistency, linearity_defect, maximal_linf_ratio, random_on,
    uniform_bound_sample, FourierConsistency, LocalizationReport, UniformBoundReport,
};
pub use cz::{CzFamily, CzKernel, KernelKind, KernelReport};
pub(crate) use family::pow2_ceil;
pub use family::{maximal, truncate, Family, IdentityFamily, SingleScaleFamily, ZeroFamily};
pub use measure::{
    bump_psi, radon_curve_measure, Angular, DiscreteMeasure, MeasureFamily, COLLISION_LIMIT, MIN_CURVE_NODES,
};
pub use smoothing::{SmoothingFamily, SMOOTHING_C2};
