use thiserror::Error;

/// Errors raised by the reductions, solvers and their input checks.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ground-set size mismatch: expected {expected}, found {found}")]
    GroundSetMismatch { expected: usize, found: usize },

    #[error("element {element} outside ground set [1, {n}]")]
    ElementOutOfRange { element: usize, n: usize },

    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error("{what} exceeds the size cap ({actual} > {limit})")]
    SizeCap {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    /// An input violates the contract of an operation (bad parameters,
    /// wrong colour budget, failed precondition).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A solver ran out of search space or resolution.
    #[error("solver exhausted: {0}")]
    Exhausted(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    /// True for errors that reject the input rather than report a solver failure.
    pub fn is_rejection(&self) -> bool {
        !matches!(self, Error::Exhausted(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
