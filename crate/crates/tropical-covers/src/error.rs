use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid edge: {0}")]
    InvalidEdge(String),

    #[error("invalid face: {0}")]
    InvalidFace(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    /// The vector lies in the lineality span and has no primitive class.
    #[error("zero class: {0}")]
    ZeroClass(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Input exceeds a documented resource guard.
    #[error("resource guard: {0}")]
    Resource(String),

    /// The stellar factorization search exhausted all insertion orders.
    #[error("search failure: {0}")]
    SearchFailure(String),

    /// Correctness tripwire; must never fire on valid data.
    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
