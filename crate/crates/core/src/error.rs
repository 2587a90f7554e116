use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: the offending field is named.
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },

    /// The adaptive integrator could not continue.
    #[error("integration failed near x = {x}: {message}")]
    Integration { x: f64, message: String },

    /// An iterative procedure (Picard sweeps, contour retries) gave up.
    #[error("no convergence after {iterations} iterations (last residual {residual:e}): {message}")]
    Convergence {
        iterations: usize,
        residual: f64,
        message: String,
    },

    /// A search produced nothing usable, e.g. no eigenvalue in the region.
    #[error("{0}")]
    NotFound(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by bad input rather than numerical trouble.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Validation { .. } | Error::Json(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
