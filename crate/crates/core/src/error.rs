use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("axis sets overlap on axis {0}")]
    OverlappingAxes(usize),

    #[error("axis {axis} out of range for a tensor with {rank} axes")]
    AxisOutOfRange { axis: usize, rank: usize },

    #[error("grid of {count} cells exceeds the cap of {cap}; lower the resolution")]
    GridTooLarge { count: u128, cap: u128 },

    #[error("trajectory state space of {cells} cells exceeds the cap of {cap}")]
    StateSpaceTooLarge { cells: u128, cap: u128 },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("matrix is not positive definite (min eigenvalue {0:e})")]
    NotPositiveDefinite(f64),

    #[error("singular conditioning block")]
    SingularConditioning,

    #[error("channel matrix is singular (|det G| = {0:e})")]
    SingularChannel(f64),

    #[error("lambda must be >= 1, got {0}")]
    InvalidLambda(f64),

    #[error("infeasible input: {0}")]
    Infeasible(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("channel is not physically degraded (max factorization residual {violation:e})")]
    NotDegraded { violation: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
