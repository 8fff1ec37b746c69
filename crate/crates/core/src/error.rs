use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("chain length {len} is invalid: {reason}")]
    InvalidLength { len: usize, reason: &'static str },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("unsupported boundary: {0}")]
    UnsupportedBoundary(&'static str),

    #[error("causality violated: {steps} steps at radius {radius} need padding {needed}, have {padding}")]
    CausalityViolation {
        steps: u64,
        radius: usize,
        needed: u64,
        padding: usize,
    },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
