use crate::scaled::ScaledComplex;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    Param { field: String, reason: String },

    #[error("{what} did not converge after {iterations} steps")]
    NonConvergence {
        what: String,
        iterations: usize,
        partial: Option<ScaledComplex>,
    },

    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("decomposition failed: {0}")]
    Decomposition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(field: &str, reason: impl Into<String>) -> Error {
    Error::Param { field: field.to_string(), reason: reason.into() }
}

pub(crate) fn no_converge(what: &str, iterations: usize, partial: Option<ScaledComplex>) -> Error {
    Error::NonConvergence { what: what.to_string(), iterations, partial }
}
