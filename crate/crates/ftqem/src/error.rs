use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("channel is not invertible (diagonal entry {0:.3e})")]
    Singular(f64),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("not a stochastic Pauli channel (off-diagonal mass {0:.3e})")]
    NotPauli(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
