use thiserror::Error;

/// Errors raised by the numerical and structural routines of this crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    Hermiticity { deviation: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("not a multimeter Choi matrix: off-block mass {off_block:.3e}")]
    NotMultimeterChoi { off_block: f64 },
    #[error("normalization violated: {0}")]
    Normalization(String),
    #[error("invalid state: {0}")]
    State(String),
    #[error("decomposition failed: residual {residual:.3e} exceeds {tolerance:.1e}")]
    Decomposition { residual: f64, tolerance: f64 },
    #[error("not a multimeter superchannel: {0}")]
    NotSuperchannel(String),
    #[error("invalid realization: {0}")]
    Realization(String),
    #[error("enumeration of {requested} elements exceeds the cap of {cap}")]
    Cap { requested: u128, cap: u128 },
    #[error("internal error: {0}")]
    Internal(String),
    #[error("class inclusion violated: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
