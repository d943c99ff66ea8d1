use std::path::PathBuf;

use dmic_core::Error as CoreError;

/// Failure of a CLI command, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// The channel does not satisfy what the command requires.
    #[error("{0}")]
    Precondition(String),

    #[error("{0}")]
    Input(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Precondition(_) => 2,
            CliError::Input(_) | CliError::Io { .. } => 3,
            CliError::Numeric(_) => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::PreconditionUnmet { .. }
            | CoreError::MarkovViolation { .. }
            | CoreError::NotBinary(_) => CliError::Precondition(msg),
            CoreError::NonFiniteObjective { .. } | CoreError::NonIdentifiable { .. } => {
                CliError::Numeric(msg)
            }
            _ => CliError::Input(msg),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
