use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("series is empty after discarding a burn-in of {burn_in} steps")]
    EmptySeries { burn_in: usize },

    #[error(
        "insufficient data: need at least {needed} durations >= tau_min = {tau_min}, found {found}"
    )]
    InsufficientData {
        needed: usize,
        found: usize,
        tau_min: u64,
    },

    #[error("invalid datum {value}: durations must be positive")]
    InvalidDatum { value: u64 },

    #[error("invalid binning: {0}")]
    InvalidBinning(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid argument {field}: {reason}")]
    InvalidArgument { field: &'static str, reason: String },
}
