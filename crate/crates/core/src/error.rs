use thiserror::Error;

/// Errors reported by the tomography toolkit.
///
/// Infeasibility of a well-formed problem is not an error; solvers report it
/// through their return type (usually `Option` or a dedicated outcome enum).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("zero vector does not span a lattice line")]
    ZeroDirection,

    #[error("lattice dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("duplicate direction {0:?}")]
    DuplicateDirection(Vec<i64>),

    #[error("{what}: {size} exceeds the brute-force guard of {limit} (raise with TOMO_GUARD_OVERRIDE)")]
    GuardExceeded { what: &'static str, size: usize, limit: usize },

    #[error("grid is unbounded: at least two directions are required")]
    UnboundedGrid,

    #[error("integer overflow while {0}")]
    Overflow(&'static str),

    #[error("matrix {0} is not positive definite")]
    NotPositiveDefinite(usize),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("{path}: {message}")]
    Schema { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema { path: path.into(), message: message.into() }
    }
}
