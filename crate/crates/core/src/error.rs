use thiserror::Error;

/// Failures raised by the numerical layers.
///
/// Structural checks never return these for a failed property; a failed property
/// is a verdict inside a report. Errors are reserved for inputs that cannot be
/// processed at all.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("grid of size {grid} cannot hold a product spanning {span} coefficients")]
    Aliasing { grid: usize, span: usize },

    #[error("vector has coefficient mass {mass:e} outside the working window [0, {window}]")]
    WindowExceeded { window: usize, mass: f64 },

    #[error("symbol is not symmetric (max |u_ij - u_ji| = {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("Blaschke zero {re} + {im}i does not lie in the open unit disk")]
    ZeroOnCircle { re: f64, im: f64 },

    #[error("ambiguous clustering: singular values {upper} and {lower} are separated by {gap:e}")]
    AmbiguousClustering { upper: f64, lower: f64, gap: f64 },

    #[error("vector is not an eigenvector of H_U^2 for s = {s} (residual {residual:e})")]
    NotAnEigenvector { s: f64, residual: f64 },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("pointwise inversion breaks down on the grid (min singular value {min_singular:e})")]
    GridSingularity { min_singular: f64 },

    #[error("subspace is not S*-invariant (residual {residual:e})")]
    NotInvariant { residual: f64 },

    #[error("candidate is not inner (residual {residual:e})")]
    NotInner { residual: f64 },

    #[error("invalid symbol specification: {0}")]
    Spec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
