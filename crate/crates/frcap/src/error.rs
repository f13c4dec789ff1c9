use thiserror::Error;

use crate::space::EnsembleSpace;

/// Errors produced by space, capacity and integral operations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("ensemble spaces differ: {left} vs {right}")]
    SpaceMismatch {
        left: EnsembleSpace,
        right: EnsembleSpace,
    },

    #[error("point violates the space constraints: {reason}")]
    NotInSpace { reason: String },

    #[error("point is not an extreme point of {space}")]
    NotExtreme { space: EnsembleSpace },

    #[error("mixing fraction {0} lies outside [0, 1]")]
    InvalidFraction(f64),

    #[error("{set} sets are not supported by the {strategy} strategy on {space}")]
    UnsupportedSet {
        set: &'static str,
        strategy: &'static str,
        space: EnsembleSpace,
    },

    #[error("matrix is not Hermitian (max asymmetry {residual:.2e})")]
    NotHermitian { residual: f64 },

    #[error("inner solver stalled; capacity bracketed in [{lower}, {upper}]")]
    SolverStalled { lower: f64, upper: f64 },

    #[error("quadrature did not reach the requested tolerance {requested:.2e} (achieved {achieved:.2e})")]
    QuadratureStalled { requested: f64, achieved: f64 },

    #[error("variable takes negative values on the extreme points (minimum {min}); the Sugeno integral needs a nonnegative variable")]
    NegativeVariable { min: f64 },

    #[error("ensemble is not representable by the {samples} sampled extreme points; increase the sample count")]
    OracleInfeasible { samples: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
