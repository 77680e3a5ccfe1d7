use thiserror::Error;

/// Library-wide error type.
///
/// `InvalidArgument` covers caller mistakes (bad shapes, infeasible points,
/// out-of-range parameters). `Capability` covers requests that exceed a
/// documented size or structure limit (e.g. exhaustive enumeration beyond the
/// supported ground-set size). `Numeric` covers runtime numerical failures
/// such as solver divergence.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not supported: {0}")]
    Capability(String),

    #[error("set function validation failed: {0}")]
    InvalidSetFunction(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("solver did not converge: {0}")]
    Unconverged(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn capability(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub(crate) fn unconverged(msg: impl Into<String>) -> Self {
        Error::Unconverged(msg.into())
    }
}
