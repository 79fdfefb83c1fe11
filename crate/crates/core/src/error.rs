use thiserror::Error;

#[derive(Debug, Error)]
pub enum RmtError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("solver failed to converge after {iterations} iterations (residual {residual:.3e})")]
    SolverFailure { iterations: usize, residual: f64 },

    #[error("inversion quality: recovered mass {mass:.4} outside the accepted range")]
    InversionQuality { mass: f64 },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, RmtError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(RmtError::InvalidArgument(msg.into()))
}
