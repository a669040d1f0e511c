use std::path::PathBuf;

use schumpeter_core::analysis::AnalysisError;
use schumpeter_core::ModelError;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;
pub const EXIT_INSUFFICIENT_DATA: i32 = 4;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid {field}: {reason}")]
    Config { field: String, reason: String },

    #[error("cannot read config {path}: {reason}")]
    ConfigFile { path: PathBuf, reason: String },

    #[error(transparent)]
    Model(#[from] ModelError),

    #[error("analysis failed: {0}")]
    Analysis(#[from] AnalysisError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {reason}")]
    Input {
        path: PathBuf,
        line: usize,
        reason: String,
    },
}

impl ExperimentError {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ExperimentError::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ExperimentError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config { .. } | ExperimentError::ConfigFile { .. } => EXIT_CONFIG,
            ExperimentError::Model(ModelError::MemoryBudget { .. }) => EXIT_RUNTIME,
            ExperimentError::Model(_) => EXIT_CONFIG,
            ExperimentError::Analysis(AnalysisError::InvalidArgument { .. })
            | ExperimentError::Analysis(AnalysisError::InvalidBinning(_)) => EXIT_CONFIG,
            ExperimentError::Analysis(_) => EXIT_INSUFFICIENT_DATA,
            ExperimentError::Io { .. } | ExperimentError::Input { .. } => EXIT_RUNTIME,
        }
    }
}
