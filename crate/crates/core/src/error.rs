use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("positivity violated: {field} = {value:e} ({context})")]
    Positivity {
        field: &'static str,
        value: f64,
        context: String,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("vacuum generated: pressure positivity condition {du:e} >= {limit:e}")]
    Vacuum { du: f64, limit: f64 },

    #[error("{what} did not converge (achieved {achieved:e})")]
    Convergence { what: &'static str, achieved: f64 },

    #[error("diagnostic failed: {0}")]
    Diagnostic(String),

    #[error("ambiguous crossing of rho* = 0.5 at x = {candidates:?}")]
    Ambiguous { candidates: Vec<f64> },

    #[error("invalid checkpoint: {0}")]
    Checkpoint(String),
}

impl Error {
    pub(crate) fn positivity(field: &'static str, value: f64, context: impl Into<String>) -> Self {
        Error::Positivity {
            field,
            value,
            context: context.into(),
        }
    }

    /// True for errors produced by the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Positivity { .. } | Error::Vacuum { .. } | Error::Convergence { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
