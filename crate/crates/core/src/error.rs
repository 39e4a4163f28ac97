use thiserror::Error;

/// Errors raised by the solver and its diagnostics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("field is not hydrostatically solenoidal (|div_H mean| = {0:.3e}); project first")]
    NotSolenoidal(f64),
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("blowup at t = {time}")]
    Blowup { time: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("forcing time derivative unavailable")]
    MissingForcingDerivative,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
