use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, unbound parameters, invalid networks.
    #[error("{0}")]
    User(String),
    /// Diagnostics were already printed; only the exit code is left.
    #[error("validation failed")]
    Invalid,
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("writing output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn user(msg: impl Into<String>) -> Self {
        CliError::User(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::User(_) | CliError::Invalid => 1,
            CliError::Io { .. } | CliError::Output(_) => 2,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::Output(io),
            other => CliError::User(format!("csv: {other:?}")),
        }
    }
}
