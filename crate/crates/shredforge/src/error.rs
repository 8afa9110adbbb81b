use std::path::PathBuf;

use shredforge_core::Error as CoreError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("ingestion failed: {0}")]
    Ingest(String),

    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("authentication failed: {0}")]
    Auth(String),

    #[error("transport error: {0}")]
    Transport(String),

    #[error("image error: {0}")]
    Image(String),

    #[error("sample {sample_id}: {source}")]
    Sample { sample_id: String, source: Box<Error> },
}

/// Broad outcome class, used for process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input or configuration.
    Validation,
    /// IO, network, or a generation step that could not complete.
    Runtime,
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn in_sample(self, sample_id: impl Into<String>) -> Self {
        Error::Sample {
            sample_id: sample_id.into(),
            source: Box::new(self),
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Core(e) => match e {
                CoreError::InvalidArgument(_) | CoreError::Precondition(_) | CoreError::TableParse(_) => {
                    ErrorClass::Validation
                }
                CoreError::DegenerateSeeds { .. }
                | CoreError::PackingOverflow { .. }
                | CoreError::FontResolution { .. } => ErrorClass::Runtime,
            },
            Error::Validation { .. } | Error::Config(_) => ErrorClass::Validation,
            Error::Io { .. } | Error::Ingest(_) | Error::Auth(_) | Error::Transport(_) | Error::Image(_) => {
                ErrorClass::Runtime
            }
            Error::Sample { source, .. } => source.class(),
        }
    }
}
