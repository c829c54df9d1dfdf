use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input violates a structural invariant (shape, symmetry, sign, flags).
    #[error("validation error: {0}")]
    Validation(String),

    /// Geometry carries no usable information (coincident points, zero volume, coplanar data).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error(
        "matrix is ill-conditioned (condition estimate {condition:.3e}); use the general estimator"
    )]
    IllConditioned { condition: f64 },

    /// b'·H^{-1}·b (or its pseudo-inverse form) is not positive.
    #[error("data is not consistent with a sphere: {0}")]
    NonSpherical(String),

    #[error("insufficient signal: only {rank} reliable eigenvalue(s), at least 2 required")]
    InsufficientSignal { rank: usize },

    #[error("no root found: {0}")]
    NoRoot(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("did not converge after {iterations} iterations")]
    NotConverged { iterations: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }
}
