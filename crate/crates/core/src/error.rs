use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVar(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVar(String),
    #[error("family mismatch: {0}")]
    FamilyMismatch(String),
    #[error("variable mismatch: {0}")]
    VarMismatch(String),
    #[error("invalid distribution: {0}")]
    InvalidDist(String),
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid intervention: {0}")]
    InvalidIntervention(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("invalid process: {0}")]
    InvalidDgp(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid interpretation: {0}")]
    InvalidInterpretation(String),
    #[error("invalid scm: {0}")]
    InvalidScm(String),
    #[error("abstraction: {0}")]
    Abstraction(String),
    #[error("scenario: {0}")]
    Scenario(String),
    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse {
        line: usize,
        column: usize,
        msg: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
