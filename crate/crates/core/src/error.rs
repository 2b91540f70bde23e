use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Cartan matrix: {0}")]
    InvalidCartan(String),

    #[error("invalid Dynkin type {family}{rank}")]
    InvalidType { family: String, rank: usize },

    #[error("weight has {got} coordinates, expected {expected}")]
    WeightShape { expected: usize, got: usize },

    #[error("weight {0} is not a non-negative combination of simple coroots")]
    NotPositive(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("dual-twist unimplemented: {0} is not simply laced")]
    DualTwist(String),

    #[error("invalid Levi subset: {0}")]
    InvalidLevi(String),

    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error("model invariant violated: {0}")]
    Invariant(String),

    #[error("not a module character: {0}")]
    NotACharacter(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
