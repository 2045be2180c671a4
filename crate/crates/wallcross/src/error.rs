use thiserror::Error;

/// Errors raised by the library, grouped by how a driver should report them:
/// input validation, mathematical precondition failures, and violations of
/// internal engine invariants.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid input for {field}: {message}")]
    Invalid { field: String, message: String },

    #[error("non-regular tau: {0}")]
    NonRegularTau(String),

    #[error("weight system is not proper: no vector pairs negatively with every weight")]
    ImproperSystem,

    #[error("tau0 lies in {0} walls; the crossing formula needs exactly one")]
    WallCountAtPoint(usize),

    #[error("eta is tangent to the wall (pairs to zero with the wall normal)")]
    EtaTangent,

    #[error("fiber dimension jumps; out of scope: {0} lie in the forbidden window [0, 2g-2]")]
    GenusWindow(String),

    #[error("path planning failed after {0} retries")]
    PathPlanningFailed(usize),

    #[error("reduction not e1-invariant: {0}")]
    NotE1Invariant(String),

    #[error("denominator factor has zero or non-constant leading z-coefficient: {0}")]
    InvalidDenominator(String),

    #[error("reduced weight system is not proper (internal invariant violated)")]
    ReducedImproper,

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Coarse category used by drivers to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Malformed input (exit code 1).
    Validation,
    /// Mathematical precondition failure (exit code 2).
    Precondition,
    /// Internal invariant violation (exit code 3).
    Internal,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        use Error::*;
        match self {
            DimensionMismatch { .. } | Invalid { .. } => ErrorCategory::Validation,
            NonRegularTau(_) | ImproperSystem | WallCountAtPoint(_) | EtaTangent
            | GenusWindow(_) => ErrorCategory::Precondition,
            PathPlanningFailed(_) | NotE1Invariant(_) | InvalidDenominator(_)
            | ReducedImproper | Internal(_) => ErrorCategory::Internal,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
