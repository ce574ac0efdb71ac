use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max |M - M^†| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    EigenNoConvergence { sweeps: usize, off_norm: f64 },

    #[error("invalid channel parameters: {0}")]
    InvalidParams(String),

    #[error("invalid time {0}: must be finite and non-negative")]
    InvalidTime(f64),

    #[error("invalid step size {0}: must be finite and positive")]
    InvalidStep(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("map is not positivity improving: {0}")]
    NotPositivityImproving(String),

    #[error("fixed-point iteration did not converge in {iterations} iterations (residual {residual:e})")]
    FixedPointNoConvergence { iterations: usize, residual: f64 },

    #[error("coefficients violate a + d >= 2|b| (a + d = {sum:e}, 2|b| = {twice_b:e})")]
    ModelViolation { sum: f64, twice_b: f64 },

    #[error("degenerate scaling operator: radicand {0:e} is not positive")]
    DegenerateScaling(f64),

    #[error("Sinkhorn normal form residual {0:e} exceeds tolerance")]
    SinkhornResidual(f64),

    #[error("vanishing detection probability {0:e}")]
    VanishingDetection(f64),

    #[error("unsupported unital parameters {0:?}: expected lambda_x >= lambda_y >= lambda_z >= 0")]
    UnorderedLambdas([f64; 3]),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
