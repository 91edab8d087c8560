use std::path::PathBuf;

/// Process exit statuses; a stable contract for scripts.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const RESOURCE: i32 = 3;
    pub const IO: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("invalid configuration in {path}: {source}")]
    Config {
        path: PathBuf,
        source: serde_json::Error,
    },

    /// The configuration is valid but exceeds the dimension cap.
    #[error("{context}: {source}")]
    Resource {
        context: String,
        source: qelm_core::Error,
    },

    #[error("{context}: {source}")]
    Core {
        context: String,
        source: qelm_core::Error,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// Classifies a core error raised while handling `context`.
    pub fn from_core(context: impl Into<String>, source: qelm_core::Error) -> Self {
        let context = context.into();
        if source.is_resource_limit() {
            CliError::Resource { context, source }
        } else {
            CliError::Core { context, source }
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } => exit::USAGE,
            CliError::Resource { .. } => exit::RESOURCE,
            CliError::Core { .. } => exit::FAILURE,
            CliError::Io { .. } => exit::IO,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
