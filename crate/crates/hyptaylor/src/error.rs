//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by kernels, gyrovector operations, the gradient
/// engine, datasets, and training.
#[derive(Debug, Error)]
pub enum Error {
    /// Bernoulli / series coefficients requested beyond the exactly
    /// representable range (k > 64 overflows the double factorials).
    #[error("coefficient overflow: Bernoulli index {0} exceeds the supported maximum of 64")]
    CoefficientOverflow(u32),

    /// Input outside a function's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A rational-function denominator fell below the singularity guard.
    #[error("near-singular denominator: |{value:e}| < {threshold:e}")]
    NearSingular { value: f64, threshold: f64 },

    /// Tensor shapes incompatible for the requested operation.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Gather/select index out of range.
    #[error("index {index} out of range for axis of length {len}")]
    Index { index: usize, len: usize },

    /// An API contract was violated (e.g. backward on a non-scalar).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Non-finite values encountered during computation.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Invalid configuration value.
    #[error("config error: {0}")]
    Config(String),

    /// Malformed or inconsistent graph structure.
    #[error("graph error: {0}")]
    Graph(String),

    /// Dataset files missing or malformed.
    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
