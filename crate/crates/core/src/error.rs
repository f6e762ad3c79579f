use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported matrix dimension {0} (only 2 and 4 are carried)")]
    UnsupportedDimension(usize),

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("matrix is not Hermitian within tolerance {0:e}")]
    NotHermitian(f64),

    #[error("{name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("length mismatch: expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("no finite threshold: {0}")]
    NoFiniteThreshold(String),

    #[error("delta = {delta} outside the feasibility window ({lo}, {hi}) for k = {k}")]
    OutsideDeltaWindow {
        delta: f64,
        lo: f64,
        hi: f64,
        k: usize,
    },

    #[error("v = {0} inadmissible for the two-Kraus construction")]
    InadmissibleV(f64),

    #[error("negative radicand in xi at v = {v}, alpha = {alpha}")]
    NegativeRadicand { v: f64, alpha: f64 },

    #[error("alpha = {alpha} inadmissible: {detail}")]
    InadmissibleAlpha { alpha: f64, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
