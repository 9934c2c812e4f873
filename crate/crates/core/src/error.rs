use thiserror::Error;

use crate::Subset;

/// Errors raised by the library.
///
/// Variants fall in three groups: malformed input (parsing and validation),
/// invalid requests (arguments that violate an operation's preconditions),
/// and internal invariant violations that indicate a bug upstream.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("index {index} out of range for ground set of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("exclude set {exclude:?} and include set {include:?} overlap")]
    Overlap { exclude: Subset, include: Subset },

    #[error("unknown element label `{0}`")]
    UnknownLabel(String),

    #[error("element `{0}` listed more than once")]
    DuplicateLabel(String),

    #[error("undefined arithmetic: {0}")]
    Arithmetic(String),

    #[error("invalid request: {0}")]
    InvalidRequest(String),

    #[error("size cap exceeded: {what} is {actual}, cap is {cap}; {required}")]
    CapExceeded {
        what: &'static str,
        actual: usize,
        cap: usize,
        required: String,
    },

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidRequest(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
