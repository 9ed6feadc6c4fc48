use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("point is not on the ray of rider {rider}")]
    OffRay { rider: usize },
    #[error("riders {a} and {b} share a supporting line")]
    Collinear { a: usize, b: usize },
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("unsupported degenerate configuration: {0}")]
    Degenerate(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("internal invariant broken: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
