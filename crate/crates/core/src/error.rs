use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "Hilbert space dimension {dim} (N = {n_tls}, photon cutoff {n_ph_max}) exceeds the guard of {limit}; \
         lower the cutoff factor or raise the guard explicitly"
    )]
    DimensionGuard {
        dim: usize,
        limit: usize,
        n_tls: usize,
        n_ph_max: usize,
    },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("space does not match parameters: {0}")]
    SpaceMismatch(String),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("negative variance {0:e} beyond round-off")]
    NegativeVariance(f64),

    #[error("power-law fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),

    #[error("power-law fit requires positive values, got {value} at N = {n}")]
    NonPositive { n: f64, value: f64 },
}
