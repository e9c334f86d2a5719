//! Error type shared by all modules.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix entries must be finite")]
    NonFiniteEntry,

    #[error("pencil is not symmetric: asymmetry {asymmetry:.3e} exceeds tolerance {tolerance:.3e}")]
    NotSymmetric { asymmetry: f64, tolerance: f64 },

    #[error("singular or badly conditioned transformation matrix")]
    SingularTransform,

    /// A numerical rank could not be decided: the singular values around the
    /// candidate cut do not show a clear gap.
    #[error(
        "indeterminate rank in {context}: retained {retained:.3e} vs discarded {discarded:.3e} \
         (tolerance {tolerance:.3e})"
    )]
    IndeterminateRank {
        retained: f64,
        discarded: f64,
        tolerance: f64,
        context: String,
    },

    #[error("inconsistent eigenstructure: {0}")]
    InconsistentStructure(String),

    #[error("left and right minimal indices differ: right {right:?}, left {left:?}")]
    UnpairedMinimalIndices { right: Vec<usize>, left: Vec<usize> },

    #[error("invalid generic component: {0}")]
    InvalidComponent(String),

    #[error("invalid structure descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("invalid eigenvalue list: {0}")]
    InvalidEigenvalues(String),

    #[error("partition length must be supplied when adding a positive constant")]
    MissingPartitionLength,

    #[error("invalid partition: {0}")]
    NotAPartition(String),

    #[error("invalid witness: residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    InvalidWitness { residual: f64, tolerance: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("assertion failed: {message} (residual {residual:.3e})")]
    AssertionFailed { message: String, residual: f64 },

    #[error("eigenvalue iteration failed to converge")]
    EigenConvergence,

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
