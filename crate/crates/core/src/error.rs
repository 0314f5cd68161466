use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("inner parallel set is empty: t = {t} is not below the inradius {inradius}")]
    EmptySet { t: f64, inradius: f64 },

    #[error("inner normal undefined at boundary point {0}")]
    UndefinedNormal(String),

    #[error("spectrum is only complete below {cutoff}, requested lambda = {lambda}")]
    Completeness { lambda: f64, cutoff: f64 },

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("eigensolver failure: {0}")]
    Solver(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}
