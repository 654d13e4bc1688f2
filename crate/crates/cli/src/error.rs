use std::fmt;

use thiserror::Error;

/// Where a configuration value came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Flag(String),
    /// Inside a `--params` list; 1-based column of the item.
    Params {
        column: usize,
    },
    File {
        path: String,
        line: usize,
        column: usize,
    },
    Env(&'static str),
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Flag(name) => write!(f, "--{name}"),
            Origin::Params { column } => write!(f, "--params:{column}"),
            Origin::File { path, line, column } => write!(f, "{path}:{line}:{column}"),
            Origin::Env(name) => f.write_str(name),
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{origin}: {message}")]
    Parse { origin: Origin, message: String },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] logimath::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn parse(origin: &Origin, message: impl Into<String>) -> Self {
        CliError::Parse {
            origin: origin.clone(),
            message: message.into(),
        }
    }

    /// 2 for anything the user can fix in the invocation, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use logimath::Error as E;
        match self {
            CliError::Parse { .. } | CliError::Usage(_) => 2,
            CliError::Core(E::InvalidParameter(_) | E::InvalidGrid(_) | E::Unsupported(_)) => 2,
            CliError::Core(_) | CliError::Io { .. } => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
