//! Experiment runner and report generator built on `imbdes`.

pub mod config;
pub mod experiment;
pub mod records;
pub mod report;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("result records: {0}")]
    Records(String),

    #[error("incomplete result grid:\n  {}", .0.join("\n  "))]
    IncompleteGrid(Vec<String>),

    #[error(transparent)]
    Core(#[from] imbdes::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub use config::{Plan, RunConfig};
pub use experiment::{run_experiment, RunSummary};
pub use report::{make_report, Report};
