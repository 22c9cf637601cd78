use thiserror::Error;

/// Errors raised by the geometry, shooting and matching routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("tangent vector based at a different point than expected")]
    BaseMismatch,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("tangent norm {norm} exceeds the injectivity radius")]
    InjectivityRadius { norm: f64 },

    #[error("antipodal points have no unique connecting geodesic")]
    Antipodal,

    #[error("degenerate edge {index}: consecutive points coincide")]
    DegenerateEdge { index: usize },

    #[error("curves are incompatible: {0}")]
    Incompatible(String),

    #[error("step {step} left the geodesic domain: {reason}")]
    StepOutOfDomain { step: usize, reason: String },

    #[error("path is not a geodesic (kind {0})")]
    NotGeodesic(&'static str),

    #[error("singular linear system (condition estimate {cond:e})")]
    Singular { cond: f64 },

    #[error("singular tridiagonal system at row {row}")]
    SingularTridiagonal { row: usize },

    #[error("geodesic shooting diverged after {} iterations", history.len())]
    ShootingDiverged { history: Vec<f64> },

    #[error("reparameterization lost monotonicity: {0}")]
    Monotonicity(String),

    #[error("need at least {needed} samples, found {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
