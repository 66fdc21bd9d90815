//! Finite quasi-metric measure spaces: anisotropic grids and weighted clouds.

mod ball;
mod diagnostics;
mod dilation;
mod homogeneous;
mod scan;

pub use ball::Ball;
pub use diagnostics::{check_geometric_doubling, doubling_diagnostics, DoublingReport};
pub use dilation::DilationGroup;
pub use homogeneous::{
    build_cloud_space, build_grid_space, load_cloud_csv, GridMeta, GridSpec, HomogeneousSpace, Mode,
    DEFAULT_SITE_BUDGET,
};
