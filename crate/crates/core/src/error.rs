use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A value exceeds the range the operation can map back from.
    #[error("range error: {0}")]
    Range(String),

    /// An iterative or adaptive method stopped before meeting its tolerance.
    #[error("no convergence in {context}: best estimate {estimate:e}, error bound {error_bound:e}")]
    NonConvergence {
        context: String,
        estimate: f64,
        error_bound: f64,
    },

    /// Two independent evaluations of the same quantity disagree.
    #[error("consistency error: {0}")]
    Consistency(String),

    /// The operation is not defined for the given model or profile.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Prefixes the context of a non-convergence error, leaving other kinds untouched.
    pub fn context(self, what: &str) -> Self {
        match self {
            Error::NonConvergence {
                context,
                estimate,
                error_bound,
            } => Error::NonConvergence {
                context: format!("{what}: {context}"),
                estimate,
                error_bound,
            },
            other => other,
        }
    }

    pub fn is_non_convergence(&self) -> bool {
        matches!(self, Error::NonConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
