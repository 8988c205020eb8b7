use thiserror::Error;

/// Errors produced by the coherence pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("eigensolver did not converge: {0}")]
    NonConvergence(String),

    #[error("2π-shifted overlap leaves the grid support: {0}")]
    ShiftOutsideSupport(String),

    #[error("oracle dimension guard: {0}")]
    DimensionGuard(String),

    #[error("capacitance matrix is not positive definite")]
    SingularCapacitance,

    #[error("at N = {n}: {source}")]
    AtJunctionCount {
        n: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True when the error (or the error it wraps) is an eigensolver failure.
    pub fn is_non_convergence(&self) -> bool {
        match self {
            Error::NonConvergence(_) => true,
            Error::AtJunctionCount { source, .. } => source.is_non_convergence(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
