//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by solver construction, configuration and execution.
#[derive(Debug, Error)]
pub enum Error {
    /// A function argument violated its precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A configuration is internally inconsistent or unusable.
    #[error("configuration error: {0}")]
    Config(String),

    /// An operation was applied to a value in the wrong representation.
    #[error("state error: {0}")]
    State(String),

    /// Non-finite values appeared during time integration.
    #[error("numerical instability detected at step {step} of {n_steps}")]
    Instability { step: usize, n_steps: usize },

    /// The assembled system has no transport (all eigenvalues zero).
    #[error("degenerate system: {0}")]
    DegenerateSystem(String),

    /// Invariant violation that indicates a bug, not bad input.
    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
