//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("symbol is not certified elliptic: {0}")]
    NotCertified(String),

    #[error("time parameter must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("computed mass {value} is below -err ({err}); kernel evaluation failed")]
    NegativeMass { value: f64, err: f64 },

    #[error("coset pieces overlap: {0}")]
    OverlappingPieces(String),

    #[error("tabulation grid too large: {cells} cells exceeds cap {cap}")]
    GridTooLarge { cells: u64, cap: u64 },

    #[error("statistical test needs expected count >= {min} per cell, got {got:.3}")]
    ExpectedCountTooSmall { min: f64, got: f64 },

    #[error("conditioning mass {mass} below threshold {threshold}")]
    ConditioningMassTooSmall { mass: f64, threshold: f64 },

    #[error("sequence invalid: {0}")]
    InvalidSequence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
