use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown decoration `{0}`")]
    UnknownLabel(String),
    #[error("invalid decoration: {0}")]
    InvalidDecoration(String),
    #[error("operands live over different decoration sets")]
    SetMismatch,
    #[error("no scaling coefficient for decoration `{0}`")]
    MissingCoefficient(String),
    #[error("constant term violation: {0}")]
    ConstantTerm(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("generator monomials are linearly dependent in degree {0:?}")]
    Dependent(Vec<u32>),
    #[error("degree hypothesis violated: {0}")]
    Grading(String),
    #[error("pre-Lie conditions fail at (i, j, k) = {0:?}")]
    Conditions((usize, usize, usize)),
    #[error("rank deficiency: rank {rank}, expected {expected}")]
    Rank { rank: usize, expected: usize },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

