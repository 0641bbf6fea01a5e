use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of an operation (inverse of zero,
    /// constant modulus, reducible prime argument, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid field specification `{spec}`: {msg}")]
    Field { spec: String, msg: String },

    #[error("enumeration of {required} polynomials exceeds the budget of {budget}")]
    Budget { required: u128, budget: u128 },

    #[error("root finder did not converge after {iterations} iterations (worst residual {worst:e})")]
    NonConvergence { iterations: usize, worst: f64 },

    #[error("cache integrity error in {path}: {msg}")]
    Integrity { path: PathBuf, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
