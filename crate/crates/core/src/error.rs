use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed step-function data (ordering, lengths, non-finite values).
    #[error("invalid step function: {0}")]
    InvalidStepFunction(String),

    /// Input text could not be parsed. `line` is 1-based when known.
    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, message: String },

    /// An operation was called outside of its precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An interval family would exceed its configured cap.
    #[error("interval family has {count} members, exceeding the cap of {cap}; raise the cap or coarsen the family")]
    CapExceeded { count: usize, cap: usize },

    /// An iterative solver did not reach its tolerance.
    #[error("no convergence after {iterations} iterations: {context}")]
    NoConvergence { iterations: usize, context: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
