use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid transition matrix: {0}")]
    InvalidKernel(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid ergodicity profile: {0}")]
    InvalidProfile(String),

    #[error("invalid symmetric kernel: {0}")]
    InvalidSymmetricKernel(String),

    #[error("chain is not ergodic: {0}")]
    NotErgodic(String),

    #[error("enumeration needs {needed} terms, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("degree m = {m} exceeds sample size n = {n}")]
    DegreeTooLarge { n: usize, m: usize },

    #[error("kernel slices are not integrable without a quadrature rule on a general state space")]
    NonIntegrable,

    #[error("kernel is not canonical: degeneracy order {degeneracy} < degree {degree}")]
    NotCanonical { degeneracy: usize, degree: usize },

    #[error("cannot bound sup_k mu P^k (V): {0}")]
    Unbounded(String),

    #[error("p must be strictly positive, got {0}")]
    PNotPositive(f64),

    #[error("argument outside its domain: {0}")]
    DomainError(String),

    #[error("general state space requires a declared B_q envelope for q = {0}")]
    NeedDeclaredEnvelope(f64),

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
