use thiserror::Error;

use eit_core::EitError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("{0}")]
    Core(#[from] EitError),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for bad input, 3 for solver and I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => 2,
            Self::Core(e) => match e {
                EitError::Solver(_) | EitError::Resource(_) | EitError::Io(_) => 3,
                _ => 2,
            },
            Self::Json(_) => 3,
        }
    }
}
