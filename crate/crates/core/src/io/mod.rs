//! Configuration, run orchestration, persistence and verification of runs.

mod config;
mod experiment;
mod files;
mod sweep;
mod verify;

pub use config::{DiagnosticsConfig, FlowConfig, GridConfig, RunConfig, ScenarioConfig, SweepConfig};
pub use experiment::{run_experiment, RunOutcome};
pub use files::{
    fmt_f64, read_curve, read_series, read_snapshot_index, snapshot_file_name, write_curve,
    write_series, write_snapshot_index, Manifest, OutputLayout, RescaledSummaryRow,
    SnapshotEntry, RESCALED_COLUMNS,
};
pub use sweep::{run_sweep, sweep_threads, SweepRow, SWEEP_FILE};
pub use verify::{verify_output, Check, CheckStatus, VerifyReport};

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::diagnostics::DiagnosticsError;
use crate::flow::FlowError;
use crate::rescale::RescaleError;
use crate::scenarios::ScenarioError;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },
    #[error("missing artifact: {0}")]
    Missing(PathBuf),
    #[error("invalid scenario: {0}")]
    Scenario(#[from] ScenarioError),
    #[error("flow failed: {0}")]
    Flow(#[from] FlowError),
    #[error("diagnostics failed: {0}")]
    Diagnostics(#[from] DiagnosticsError),
    #[error("rescaling failed: {0}")]
    Rescale(#[from] RescaleError),
}

impl IoError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        IoError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }

    /// Process exit code: 2 for configuration and missing input, 3 for an
    /// invalid scenario, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            IoError::Config(_) | IoError::Missing(_) | IoError::Io { .. } => 2,
            IoError::Scenario(_) => 3,
            IoError::Flow(
                FlowError::NotMeanConvex { .. } | FlowError::NotEmbedded(..) | FlowError::TooFewNodes(_),
            ) => 3,
            _ => 1,
        }
    }
}
