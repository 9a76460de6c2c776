use thiserror::Error;

use crate::spectral::Wavevector;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids (K={0}, kappa0={1}) vs (K={2}, kappa0={3})")]
    GridMismatch(usize, f64, usize, f64),

    #[error("coefficient supplied at the zero wavevector")]
    ZeroMode,

    #[error("wavevector ({}, {}) lies outside the truncation |k|_inf <= {1}", .0.k1, .0.k2)]
    OutOfGrid(Wavevector, usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Overflow, blow-up or an otherwise non-finite state.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
