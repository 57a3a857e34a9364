use thiserror::Error;

/// Which half of the real axis a table kernel piece lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfAxis {
    Negative,
    Positive,
}

impl std::fmt::Display for HalfAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HalfAxis::Negative => f.write_str("negative"),
            HalfAxis::Positive => f.write_str("positive"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("kernel undefined at 0")]
    KernelUndefinedAtZero,

    #[error("insufficient knots on the {0} half-axis")]
    InsufficientKnots(HalfAxis),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("field is finite at {finite_points} points, need more than {nodes}")]
    InsufficientFieldSupport { finite_points: usize, nodes: usize },

    #[error("admissibility violated numerically")]
    AdmissibilityViolated,

    #[error("not in regularity set (interval {index} has m = -inf)")]
    NotInRegularitySet { index: usize },

    #[error("hypotheses of main theorem unmet: {0}")]
    HypothesesUnmet(String),

    #[error("solver failed: best residual {best_residual:e}")]
    SolverFailed { best_residual: f64, best_y: Vec<f64> },

    #[error("ball leaves regularity set")]
    BallLeavesRegularitySet,

    #[error("degenerate ball: radius must be positive")]
    DegenerateBall,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("interpolation consistency check failed at index {index}: achieved {achieved}, target {target}")]
    InconsistentInterpolation { index: usize, achieved: f64, target: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
