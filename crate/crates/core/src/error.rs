use thiserror::Error;

/// Errors raised by the rate-region computations.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum GicError {
    #[error("cross gain {name} = {value} is outside the weak-interference regime [0, 1)")]
    NonWeakRegime { name: &'static str, value: f64 },

    #[error("{name} must be strictly positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("invalid power split: {0}")]
    InvalidSplit(String),

    #[error("invalid rate vector: {0}")]
    InvalidRates(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("ground set of size {0} exceeds the exhaustive-check limit of {max}", max = crate::polymatroid::MAX_GROUND)]
    TooLarge(usize),

    #[error("invalid decoding order: {0}")]
    InvalidOrder(String),

    #[error("decoded and noise sets overlap (mask {0:#b})")]
    OverlappingSets(u32),

    #[error("slice of the four-input region disagrees with the HK polytope: {constraint} residual {residual:e}")]
    SliceMismatch { constraint: String, residual: f64 },

    #[error("point is not on the sum-rate facet of {receiver} (gap {gap:e})")]
    NotOnFacet { receiver: String, gap: f64 },

    #[error("no pair of corner points reproduces the facet point within tolerance")]
    NoCornerPair,

    #[error(
        "nested re-solve left {residual:e} public power (tolerance {tolerance:e}) at mu = {mu}"
    )]
    VerificationFailed {
        mu: f64,
        residual: f64,
        tolerance: f64,
    },

    #[error("bad layer width: {0}")]
    BadDelta(String),

    #[error("upper entropy bound requires the signal power")]
    MissingPower,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, GicError>;
