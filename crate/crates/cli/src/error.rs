use std::path::PathBuf;

use thiserror::Error;

/// Process exit status for a configuration error.
pub const EXIT_CONFIG: i32 = 2;
/// Process exit status when any repetition hit a numerical failure.
pub const EXIT_NUMERICAL: i32 = 3;
/// Process exit status for I/O failures.
pub const EXIT_IO: i32 = 1;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Core(#[from] vigraal_core::Error),
}

impl HarnessError {
    pub fn config(msg: impl Into<String>) -> Self {
        HarnessError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Json { .. } => EXIT_CONFIG,
            HarnessError::Io { .. } => EXIT_IO,
            HarnessError::Core(vigraal_core::Error::NumericalFailure { .. }) => EXIT_NUMERICAL,
            // Everything else the core rejects is a bad parameter or pairing.
            HarnessError::Core(_) => EXIT_CONFIG,
        }
    }
}
