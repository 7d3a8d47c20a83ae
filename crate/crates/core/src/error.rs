use thiserror::Error;

/// Errors produced by the solvers and the state machinery.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum NuelError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate game: {0}")]
    DegenerateGame(String),

    #[error("singular payoff system for live players {combo:?} (determinant {determinant:e})")]
    SingularSystem { combo: Vec<usize>, determinant: f64 },

    #[error("iteration did not converge within {iterations} sweeps (last change {last_change:e})")]
    NonConvergence { iterations: usize, last_change: f64 },

    #[error("play from {start} did not terminate within {steps} steps")]
    NonTermination { start: String, steps: usize },

    #[error("internal consistency: {0}")]
    Inconsistent(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = NuelError> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> NuelError {
    NuelError::InvalidArgument(msg.into())
}
