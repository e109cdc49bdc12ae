use thiserror::Error;

/// Errors raised by grid construction, transforms and solver operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("non-finite values encountered: {0}")]
    NonFinite(String),

    #[error("spectrum is not conjugate-symmetric (imaginary residue {residue:.3e})")]
    SpectrumNotReal { residue: f64 },

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed field file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
