use thiserror::Error;

use crate::dynamics::Trajectory;

/// Errors raised by the jet, duality and dynamics operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("stencil error: {0}")]
    Stencil(String),

    #[error("point outside the model domain: {0}")]
    Domain(String),

    #[error("chart transition error: {0}")]
    Transition(String),

    #[error("newton iteration did not converge after {iterations} iterations (last residual {last_residual:e})")]
    Convergence { iterations: usize, last_residual: f64 },

    #[error("regularity error: {0}")]
    Regularity(String),

    #[error("search box too small: maximiser at {argmax:?} lies on the boundary")]
    BoxTooSmall { argmax: Vec<f64> },

    /// The flow left the domain; `partial` holds everything integrated so far.
    #[error("integration stopped at t = {time}: {reason}")]
    Integration {
        time: f64,
        reason: String,
        partial: Box<Trajectory>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
