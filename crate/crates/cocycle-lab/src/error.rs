use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix has non-finite entries")]
    InvalidMatrix,
    #[error("dimension mismatch: {0}")]
    DimError(String),
    #[error("renormalized product underflow: stretch below 1e-300")]
    NumericalUnderflow,
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
