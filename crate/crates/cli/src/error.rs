use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const FAILED: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const NUMERICAL: i32 = 3;
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => exit::CONFIG,
            CliError::Numerical(_) => exit::NUMERICAL,
        }
    }
}

impl From<rwl_core::Error> for CliError {
    fn from(e: rwl_core::Error) -> Self {
        match e {
            rwl_core::Error::InvalidConfig(msg) => CliError::Config(msg),
            other => CliError::Numerical(other.to_string()),
        }
    }
}
