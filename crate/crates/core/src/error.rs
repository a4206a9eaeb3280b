use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("rank-deficient basis: expected rank {expected}, found {found}")]
    RankDeficient { expected: usize, found: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("solver integrity error: {0}")]
    SolverIntegrity(String),

    #[error("LP budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("not a projection onto a zero-sum range: {0}")]
    NotZeroSumProjection(String),

    #[error("operator is not permutation invariant: {0}")]
    NotSymmetrized(String),

    #[error("decomposition integrity error: {0}")]
    Integrity(String),

    #[error("base constant mismatch: subspace has {found}, plan expects {expected}")]
    BaseConstantMismatch { expected: String, found: String },

    #[error("parameter is not exact: {0}")]
    NotExact(String),

    #[error("oracle inconclusive: {0}")]
    OracleInconclusive(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
