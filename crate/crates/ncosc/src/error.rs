use ncosc_core::Error as CoreError;

/// Failures of a run, grouped by exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub const EXIT_VALIDATION: u8 = 2;
    pub const EXIT_NUMERICAL: u8 = 3;

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(_) => Self::EXIT_NUMERICAL,
            CliError::Validation(_) | CliError::Io { .. } => Self::EXIT_VALIDATION,
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NonHermitian { .. }
            | CoreError::NoConvergence(_)
            | CoreError::LevelMatchingAmbiguity { .. }
            | CoreError::NoSignMatch
            | CoreError::NoConservedGenerator
            | CoreError::Solvable
            | CoreError::NoComplement => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}
