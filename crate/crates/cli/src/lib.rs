//! Scenario runner: parses scenario files, runs the constructions and checks of
//! `sparsedom`, and writes CSV tables with a pass/fail summary.

pub mod config;
pub mod runner;
pub mod scenarios;
pub mod summary;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] sparsedom::Error),
}

/// Exit status for a run that passed all checks.
pub const EXIT_PASS: i32 = 0;
/// Exit status for configuration, input or output errors.
pub const EXIT_ERROR: i32 = 1;
/// Exit status when a check failed.
pub const EXIT_FAIL: i32 = 2;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use sparsedom::Error as E;
        match self {
            CliError::Core(E::Check(_) | E::NoConvergence(_) | E::EmptyMajorSubset { .. }) => EXIT_FAIL,
            _ => EXIT_ERROR,
        }
    }
}
