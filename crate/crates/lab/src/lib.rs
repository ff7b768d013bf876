//! Experiment runner for `smoothlab-core`: configs, pipelines, run records and output files.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod record;
pub mod run;

pub use config::{ExperimentConfig, Format, Kind};
pub use record::{Check, RunRecord, RunResults, Table, VerdictRecord};
pub use run::{execute, run_experiment};

/// Failures, each with its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config field `{field}`: {msg}")]
    Config { field: String, msg: String },
    #[error("{context}: {source}")]
    Numeric { context: String, source: smoothlab_core::Error },
    #[error(transparent)]
    Io(#[from] anyhow::Error),
}

impl LabError {
    /// 2 for usage and config errors, 3 for runtime failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            LabError::Usage(_) | LabError::Config { .. } => 2,
            LabError::Numeric { .. } | LabError::Io(_) => 3,
        }
    }
}
