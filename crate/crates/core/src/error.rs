use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("basis index {0} out of range (expected -1..=11)")]
    BasisIndex(i32),

    #[error("not supercritical: re(a_1) = {0} must be negative")]
    NotSupercritical(f64),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },

    #[error("amplitude collapse: |z_{index}| = {modulus:e} at t = {t}")]
    AmplitudeCollapse { index: usize, modulus: f64, t: f64 },

    #[error("time grids differ: {0}")]
    GridMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_finite(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            field,
            reason: format!("must be finite, got {value}"),
        })
    }
}
