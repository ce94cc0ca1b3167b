use num_complex::Complex64;
use thiserror::Error;

/// Errors produced anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("response denominator vanishes at delta/omega_m = {delta:e} (|d| = {magnitude:e})")]
    Singular { delta: f64, magnitude: f64 },

    #[error("root finder did not converge after {iterations} iterations (max residual {max_residual:e})")]
    NoConvergence {
        iterations: usize,
        best: Vec<Complex64>,
        residuals: Vec<f64>,
        max_residual: f64,
    },

    #[error("unresolved {kind} at delta/omega_m = {center:.6}: fwhm {fwhm:e} spans fewer than 3 grid steps ({step:e})")]
    Unresolved {
        kind: &'static str,
        center: f64,
        fwhm: f64,
        step: f64,
    },

    #[error("grid refinement exceeded its budget of {budget} points")]
    Budget { budget: usize },

    #[error("config error at line {line}, field `{field}`: {message}")]
    Config {
        line: usize,
        field: String,
        message: String,
    },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(line: usize, field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            line,
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter { .. } | Error::Config { .. } | Error::Usage(_) => 2,
            Error::Domain(_) | Error::Singular { .. } | Error::NoConvergence { .. } => 3,
            Error::Unresolved { .. } | Error::Budget { .. } => 4,
            Error::Io { .. } => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
