use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid argument: nonpositive time, out-of-range exponent, etc.
    #[error("domain error: {0}")]
    Domain(String),
    /// Points or blocks of mismatched dimension.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// A quadrature routine failed to reach the requested tolerance.
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    /// Hypotheses of a bound or certificate do not hold.
    #[error("hypothesis failure: {0}")]
    Hypothesis(String),
    /// An operation is not implemented for this potential shape.
    #[error("unsupported potential shape: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
