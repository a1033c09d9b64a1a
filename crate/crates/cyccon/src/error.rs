use thiserror::Error;

/// Failures surfaced to the command line, split by exit code: input problems
/// (unreadable files, malformed documents, invalid systems) exit 1, unmet
/// preconditions of an otherwise valid request exit 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Precondition(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. }
            | CliError::Write { .. }
            | CliError::Parse { .. }
            | CliError::Invalid(_) => crate::EXIT_INPUT_ERROR,
            CliError::Precondition(_) => crate::EXIT_PRECONDITION,
        }
    }
}
