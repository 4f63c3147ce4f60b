use thiserror::Error;

/// Errors reported by the numerical kernels and the model steppers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    #[error("{what} violated: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    StructureViolation {
        what: &'static str,
        defect: f64,
        tol: f64,
    },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:.3e})")]
    EigenNoConvergence { sweeps: usize, off: f64 },

    #[error("matrix is numerically singular: smallest singular value {sigma_min:.3e}")]
    NearSingular { sigma_min: f64 },

    #[error("agent {index}: predictor produced a {kind} vector")]
    BadPredictor { index: usize, kind: &'static str },

    #[error("existence condition violated: {condition} (margin {margin:.3e})")]
    ExistenceViolated { condition: String, margin: f64 },

    #[error("non-finite value encountered in {place}")]
    NonFinite { place: &'static str },

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
