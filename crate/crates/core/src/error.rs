use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid exponent: {0}")]
    Exponent(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("unsupported request: {0}")]
    Unsupported(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
