use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grid of {sites} sites exceeds the budget of {budget} sites (about {megabytes} MiB of state)")]
    Budget { sites: usize, budget: usize, megabytes: usize },
    #[error("metric table is not symmetric at ({i}, {j}): {dij} vs {dji}")]
    Asymmetric { i: usize, j: usize, dij: f64, dji: f64 },
    #[error("metric table has zero distance between distinct points {i} and {j}")]
    Degenerate { i: usize, j: usize },
    #[error("invalid set: {0}")]
    InvalidSet(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("check failed: {0}")]
    Check(String),
    #[error("stopping construction did not converge: {0}")]
    NoConvergence(String),
    #[error("empty major subset for ball {ball} at level {level} (center {center}, scale {scale})")]
    EmptyMajorSubset { level: usize, ball: usize, center: usize, scale: i32 },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
