use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max |M - M^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("{name} = {value} is out of range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("index {index} out of range for {len} elements")]
    BadIndex { index: usize, len: usize },

    #[error("operator {0} has zero trace")]
    DegenerateOperator(usize),

    #[error("operator count mismatch: {0} vs {1}")]
    CountMismatch(usize, usize),

    #[error("generator {index} is not unitary (defect {defect:e})")]
    NotUnitary { index: usize, defect: f64 },

    #[error(
        "group closure exceeded {0} elements; the generators do not generate a finite group \
         (a projective representation must be replaced by a central extension with explicit phases)"
    )]
    GroupNotFinite(usize),

    #[error("character sum {0} is not an integer; the element list is not a closed group")]
    ClosureDefect(f64),

    #[error("representation has complex entries (max |Im| = {0:e}); a real representation is required")]
    RealRepRequired(f64),

    #[error("ensemble is not symmetric under the representation")]
    NotSymmetric,

    #[error("normalized operator {index} has trace {trace}, expected {expected}")]
    Normalization {
        index: usize,
        trace: f64,
        expected: f64,
    },

    #[error("convex combination does not reproduce the identity (residual {0:e})")]
    Residual(f64),

    #[error("probability {0:e} is negative beyond tolerance")]
    NegativeProbability(f64),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
