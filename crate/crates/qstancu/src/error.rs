use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument left the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A sampled function value was not finite.
    #[error("evaluation error: {0}")]
    Eval(String),

    /// Weight mass was not reached before the hard term cap.
    #[error("truncation budget exhausted: {0}")]
    TruncationBudget(String),

    /// A declared Lipschitz membership failed the sampled pair check.
    #[error("lipschitz declaration rejected: {0}")]
    LipschitzViolation(String),

    /// A function handed to a weighted-norm experiment is not in the weighted class.
    #[error("weighted-class violation: {0}")]
    WeightedClass(String),

    /// Malformed or inconsistent experiment configuration.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
