use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum XyzError {
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("index {index} out of range ({len} columns)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("response vector has zero l1 norm")]
    ZeroResponse,

    #[error("row {row} has no nonzero entry and cannot be rescaled")]
    ZeroRow { row: usize },

    #[error("entry at row {row}, column {col} is {value}, outside [-1, 1]")]
    EntryOutOfRange { row: usize, col: usize, value: f64 },

    #[error("strength^M underflows to zero for M = {subsample_size}; use a smaller subsample size")]
    Underflow { subsample_size: usize },

    #[error("strength sample is empty")]
    EmptySample,

    #[error("guard exceeded: {0}")]
    GuardExceeded(String),

    #[error(
        "coordinate descent did not converge at lambda index {lambda_index} \
         after {iterations} cycles (last max change {max_change:e})"
    )]
    NoConvergence {
        lambda_index: usize,
        iterations: usize,
        max_change: f64,
    },
}

pub type Result<T> = std::result::Result<T, XyzError>;
