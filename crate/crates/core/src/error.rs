use thiserror::Error;

/// Errors raised while building, closing or analysing moment states.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClosureError {
    #[error("energy density must be positive, got {0}")]
    NonPositiveEnergy(f64),

    #[error("trace of the second moment ({trace}) does not match e0 ({e0})")]
    TraceMismatch { e0: f64, trace: f64 },

    #[error("non-finite moment component")]
    NonFinite,

    #[error("second moment has eigenvalue {lambda} below zero (e0 = {e0})")]
    NegativeEigenvalue { lambda: f64, e0: f64 },

    #[error("axis {axis}: eigenvalue vanishes but first moment component is {f}")]
    BoundaryViolation { axis: usize, f: f64 },

    #[error("state is not realizable (margin {margin})")]
    NotRealizable { margin: f64 },

    #[error("{0}")]
    DomainError(String),

    #[error("beta shape is a Dirac limit and has no pointwise density")]
    DiracEvaluation,

    #[error("moment order {0} is not supported (0..=3)")]
    UnsupportedOrder(u32),

    #[error("1D moments (m1 = {m1}, m2 = {m2}) are not realizable")]
    Unrealizable1D { m1: f64, m2: f64 },

    #[error("axis {axis}: negative ansatz weight {w}")]
    NegativeWeight { axis: usize, w: f64 },

    #[error("axis {axis}: weight vanishes but first moment component is {f}")]
    ZeroWeightInconsistency { axis: usize, f: f64 },

    #[error("state is degenerate: {0}")]
    DegenerateState(String),

    #[error("closure could not be evaluated: {0}")]
    ClosureFailure(String),
}

pub type Result<T> = std::result::Result<T, ClosureError>;
