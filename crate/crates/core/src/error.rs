use crate::C64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Clone, Debug, Error)]
pub enum Error {
    #[error("vector norm is zero")]
    ZeroVector,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("cutoff {cutoff} too small: discarded norm {discarded:e}")]
    CutoffTooSmall { cutoff: usize, discarded: f64 },

    #[error("leading polynomial coefficient vanished (|p_r| = {magnitude:e})")]
    DegenerateLeadingCoefficient { magnitude: f64 },

    #[error("precision loss at z = {z}: error estimate {estimate:e} vs |value| {value:e}")]
    PrecisionLoss { z: C64, estimate: f64, value: f64 },

    #[error("zero on or near the contour near z = {z}")]
    ZeroOnContour { z: C64 },

    #[error("box half-width {halfwidth} does not strictly contain all zeros")]
    BoxTooSmall { halfwidth: f64 },

    #[error("root finder did not converge after {iterations} iterations (worst residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        roots: Vec<C64>,
    },

    #[error("zero collision at t ~ {time} (gap {gap:e})")]
    ZeroCollision { time: f64, gap: f64 },

    #[error("step size underflow at t = {time} (h = {step:e})")]
    StepFailure { time: f64, step: f64 },

    #[error("closed form unavailable: {0}")]
    UnsupportedHamiltonian(String),

    #[error("initial zeros are not pairwise distinct (gap {gap:e})")]
    DegenerateInitialZeros { gap: f64 },

    #[error("eigenvalue tracking ambiguous at t = {time}")]
    TrackingAmbiguity { time: f64 },

    #[error("truncation leakage: top-quarter norm {norm:e}")]
    TruncationLeakage { norm: f64 },

    #[error("found {found} zeros, expected {expected}")]
    CountMismatch { found: usize, expected: usize },

    #[error("time {time} is not covered by the trajectory")]
    TimeNotCovered { time: f64 },
}

impl Error {
    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroVector => "ZeroVector",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::InvalidState(_) => "InvalidState",
            Error::CutoffTooSmall { .. } => "CutoffTooSmall",
            Error::DegenerateLeadingCoefficient { .. } => "DegenerateLeadingCoefficient",
            Error::PrecisionLoss { .. } => "PrecisionLoss",
            Error::ZeroOnContour { .. } => "ZeroOnContour",
            Error::BoxTooSmall { .. } => "BoxTooSmall",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::ZeroCollision { .. } => "ZeroCollision",
            Error::StepFailure { .. } => "StepFailure",
            Error::UnsupportedHamiltonian(_) => "UnsupportedHamiltonian",
            Error::DegenerateInitialZeros { .. } => "DegenerateInitialZeros",
            Error::TrackingAmbiguity { .. } => "TrackingAmbiguity",
            Error::TruncationLeakage { .. } => "TruncationLeakage",
            Error::CountMismatch { .. } => "CountMismatch",
            Error::TimeNotCovered { .. } => "TimeNotCovered",
        }
    }
}
