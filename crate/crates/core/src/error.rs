use thiserror::Error;

/// Coarse classification of an [`Error`], used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input: bad JSON, wrong shapes, unparsable rationals.
    Parse,
    /// Well-formed input that violates a mathematical invariant or precondition.
    Invariant,
    /// Requested branch that is deliberately not implemented.
    Unsupported,
    /// An internal consistency check failed. Always a bug in this crate.
    Internal,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("containment violated: {what}; offending vector {vector}")]
    Containment { what: String, vector: String },

    #[error("invalid complex: {0}")]
    Complex(String),

    #[error("invalid filtration: {0}")]
    Filtration(String),

    #[error("invalid algebra: {0}")]
    Algebra(String),

    #[error("Leibniz rule fails on basis pair ({left}, {right}); discrepancy {discrepancy}")]
    Leibniz {
        left: String,
        right: String,
        discrepancy: String,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. } => ErrorKind::Parse,
            Error::Unsupported(_) => ErrorKind::Unsupported,
            Error::Internal(_) => ErrorKind::Internal,
            _ => ErrorKind::Invariant,
        }
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
