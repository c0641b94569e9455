//! Crate-wide error type.
//!
//! Errors split into two families that the CLI maps onto distinct exit
//! codes: precondition/configuration problems (exit 2) and numerical
//! failures such as non-convergent eigensolves or degenerate partitions
//! (exit 3).

use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A configuration file or flag set could not be interpreted.
    #[error("configuration error: {0}")]
    Config(String),

    /// A tiling construction is not available for the requested parameters
    /// (for example a hexagonal tiling below its degeneration threshold).
    #[error("construction failed: {0}")]
    Construction(String),

    /// The iterative eigensolver exhausted its iteration budget.
    #[error(
        "eigensolver did not converge after {iterations} iterations \
         (best residual {residual:.3e}, tolerance {tolerance:.3e})"
    )]
    NoConvergence {
        iterations: usize,
        residual: f64,
        tolerance: f64,
    },

    /// A partition lost a cell (a label vanished or a domain came out empty).
    #[error("degenerate partition: {0}")]
    DegeneratePartition(String),

    /// An optimization run produced no usable result (for example every
    /// start of a multistart failed).
    #[error("optimization failed: {0}")]
    Optimization(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code the CLI uses for this error: 2 for precondition
    /// and configuration errors, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::Config(_) | Error::Construction(_) => 2,
            Error::NoConvergence { .. }
            | Error::DegeneratePartition(_)
            | Error::Optimization(_) => 3,
            Error::Io(_) | Error::Json(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
