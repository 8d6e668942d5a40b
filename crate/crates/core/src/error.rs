use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation (non-positive
    /// ratio, weight outside `[0, 1]`, non-finite function value, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The call is malformed: mismatched dimensions, depth beyond the
    /// sequence, empty ranges and so on.
    #[error("usage error: {0}")]
    Usage(String),

    /// The cyclic Jacobi solver hit its sweep cap.
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    /// A hypothesis of the inequality does not hold for the given instance.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The extended-precision oracle produced a non-finite value.
    #[error("oracle failure: {0}")]
    Oracle(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    /// True for errors caused by bad input rather than by a failed check.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::NoConvergence { .. } | Error::Oracle(_))
    }
}
