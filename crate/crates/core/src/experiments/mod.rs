//! Configuration-driven experiments producing the data behind each figure
//! as CSV tables.

mod config;
mod runner;
mod table;

use thiserror::Error;

pub use config::{
    load_config_file, ExperimentConfig, ExperimentId, Method, ProfileKind, PropagationControls,
    Sweep, SweepVariable,
};
pub use runner::{propagation_config, run_experiment, validate_config, worker_count, WORKERS_ENV};
pub use table::ResultTable;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("configuration error: {0}")]
    Config(String),
    /// A sweep point failed; rows computed before it are kept in `partial`.
    #[error("sweep point {point} failed: {message}")]
    Convergence {
        point: String,
        message: String,
        partial: Option<Box<ResultTable>>,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl ExperimentError {
    /// Process exit status: 1 configuration, 2 convergence, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 1,
            Self::Convergence { .. } => 2,
            Self::Io(_) => 3,
        }
    }
}
