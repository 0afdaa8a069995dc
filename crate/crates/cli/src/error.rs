use qrlsim_core::error::QrlError;
use thiserror::Error;

/// Failure of a command, with a stable process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Calibration(String),
    #[error("missing prerequisite: {0}")]
    Missing(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Run(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Run(_) => 1,
            CliError::Calibration(_) => 2,
            CliError::Missing(_) => 3,
            CliError::Config(_) => 4,
        }
    }
}

impl From<QrlError> for CliError {
    fn from(e: QrlError) -> Self {
        match e {
            QrlError::Calibration { .. } => CliError::Calibration(e.to_string()),
            QrlError::InvalidParameter(_) | QrlError::EnvelopeTooWide { .. } => CliError::Config(e.to_string()),
            other => CliError::Run(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn io_err(what: &std::path::Path, e: impl std::fmt::Display) -> CliError {
    CliError::Run(format!("{}: {e}", what.display()))
}
