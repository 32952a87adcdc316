use thiserror::Error;

use reinsure_core::Error as CoreError;

/// Failures of a CLI run, split by the exit status they map to.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration, arguments or input files (exit status 1).
    #[error("validation error: {0}")]
    Validation(String),

    /// A numerical procedure failed (exit status 2).
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Output could not be written (exit status 2).
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Validation(_) => 1,
            Self::Numeric(_) | Self::Io(_) => 2,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Numeric(_) | CoreError::ConcavityViolation { .. } => Self::Numeric(e.to_string()),
            CoreError::Domain(_) | CoreError::Structural(_) | CoreError::Config(_) | CoreError::Unsupported(_) => {
                Self::Validation(e.to_string())
            }
        }
    }
}
