use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("pole: denominator vanishes at q = {at}")]
    Pole { at: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("cost cap exceeded: p^N = {terms} terms > limit {limit}")]
    CostCapExceeded { terms: u128, limit: u64 },

    #[error("convergence not reached after {levels} levels (achieved {achieved} of {requested} digits)")]
    ConvergenceNotReached {
        levels: u32,
        achieved: i64,
        requested: i64,
    },

    #[error("{0} requires a p-adic context")]
    NotExact(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
