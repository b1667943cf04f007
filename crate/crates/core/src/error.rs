use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A scenario or field failed validation.
    #[error("validation error in `{key}`: {message}")]
    Validation { key: String, message: String },

    /// The scenario file could not be parsed.
    #[error("{path}:{line}: key `{key}`: {message}")]
    Parse {
        path: String,
        line: usize,
        key: String,
        message: String,
    },

    #[error("{what} did not converge after {iterations} iterations (last estimate {estimate:.6e}, residual {residual:.3e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        estimate: f64,
        residual: f64,
    },

    #[error("fixed-point iteration stalled after {iterations} iterations; increments: {history:?}")]
    FixedPointStalled { iterations: usize, history: Vec<f64> },

    #[error("{0}")]
    Inapplicable(String),

    #[error("no positive speed: principal eigenvalue non-negative ({lambda1:.6e})")]
    NoPositiveSpeed { lambda1: f64 },

    #[error("speed minimum not bracketed by the scan; scan table (r, -k(r)/r): {table:?}")]
    Unbracketed { table: Vec<(f64, f64)> },

    #[error("positivity violation: {0}")]
    Positivity(String),

    #[error("domain too small: front at {position:.3} reached {distance:.3} of the boundary at t = {t:.3}")]
    DomainTooSmall { t: f64, position: f64, distance: f64 },

    #[error("non-finite or negative state at t = {t:.4} (step {step}): {message}")]
    Blowup { t: f64, step: usize, message: String },

    #[error("insufficient samples: {found} in the fit window, need {needed}")]
    InsufficientSamples { found: usize, needed: usize },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn validation(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 for input problems, 3 for solver failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation { .. } | Error::Parse { .. } | Error::Io { .. } => 2,
            _ => 3,
        }
    }
}
