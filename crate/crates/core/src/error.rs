use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The result cannot be represented (overflow).
    #[error("range error: {0}")]
    Range(String),
    /// An integral that the operation needs diverges for these parameters.
    #[error("divergence: {0}")]
    Divergence(String),
    /// Grid sizes or grid parameters are invalid.
    #[error("configuration error: {0}")]
    Config(String),
    /// Sample arrays do not belong to the expected grid.
    #[error("shape error: {0}")]
    Shape(String),
    /// The operation is only defined for a subset of parameters (e.g. α = 0).
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// A ratio would divide by zero (typically f ≡ 0).
    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),
    /// A quadrature error estimate exceeds what the operation can tolerate.
    #[error("accuracy error: {0}")]
    Accuracy(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
