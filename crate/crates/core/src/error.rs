use thiserror::Error;

/// Errors raised by the model and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid {field}: {reason}")]
    Config { field: &'static str, reason: String },

    #[error("index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("dimension mismatch: expected n = {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid tensor entry {triple:?}: {reason}")]
    InvalidTriple {
        triple: (usize, usize, usize),
        reason: String,
    },

    #[error("buffering needs {needed} bytes, budget is {budget}; use streaming output")]
    MemoryBudget { needed: u64, budget: u64 },
}

impl ModelError {
    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        ModelError::Config {
            field,
            reason: reason.into(),
        }
    }
}
