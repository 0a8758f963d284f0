use std::io;

use thiserror::Error;
use topchain_core::index::IndexError;

use crate::index_file::FormatError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    pub fn input(context: impl std::fmt::Display, err: impl std::fmt::Display) -> Self {
        CliError::Input(format!("{context}: {err}"))
    }
}

impl From<IndexError> for CliError {
    fn from(e: IndexError) -> Self {
        match e {
            IndexError::ZeroK | IndexError::Strategy(_) | IndexError::Chain(_) => CliError::Usage(e.to_string()),
            IndexError::Cycle(_) | IndexError::Inconsistent(_) => CliError::Internal(e.to_string()),
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}
