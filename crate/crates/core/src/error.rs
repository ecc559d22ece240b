use thiserror::Error;

/// Errors raised by state constructors, channels and measures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("subsystem dimensions {dims:?} do not multiply to {dim}")]
    BadSubsystems { dims: Vec<usize>, dim: usize },

    #[error("invalid subsystem index {index} (have {count} subsystems)")]
    InvalidSubsystem { index: usize, count: usize },

    #[error("Kraus operators violate completeness (deviation {0:e})")]
    Completeness(f64),

    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state is not X-shaped (off-X entry {0:e})")]
    NotXShaped(f64),

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("empty candidate grid")]
    EmptyGrid,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
