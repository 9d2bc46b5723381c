use thiserror::Error;

/// Errors produced by the estimation and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("fingerprint length mismatch: t={left} vs t={right}")]
    MismatchedT { left: u32, right: u32 },

    #[error("raw trials required: local moment matching needs per-trial outcomes, not counts")]
    RawTrialsRequired,

    #[error("linear program did not converge within {iterations} pivots")]
    LpIterationLimit { iterations: usize },

    #[error("linear program is infeasible")]
    LpInfeasible,

    #[error("linear program is unbounded")]
    LpUnbounded,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
