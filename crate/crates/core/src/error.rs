use thiserror::Error;

/// Errors produced by the model-checking library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown semiring `{0}` (expected one of boolean, prob, maxplus, minplus, maxmin, expectation)")]
    UnknownSemiring(String),

    #[error("invalid weight literal `{literal}` for semiring {semiring}")]
    InvalidWeight {
        literal: String,
        semiring: &'static str,
    },

    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },

    #[error("formula syntax error at offset {pos}: {msg}")]
    Formula { pos: usize, msg: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("semiring mismatch: {0} vs {1}")]
    SemiringMismatch(&'static str, &'static str),

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("path enumeration bound {0} exceeds the limit of {1}")]
    BoundExceeded(usize, usize),

    #[error("unsupported feature: {0}")]
    Unsupported(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("partition is not a bisimulation: {0}")]
    NotBisimulation(String),

    #[error("incompatible automata: {0}")]
    Incompatible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
