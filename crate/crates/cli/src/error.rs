use std::path::PathBuf;

use thiserror::Error;

/// Exit status for malformed command lines.
pub const EXIT_USAGE: u8 = 64;
/// Exit status for unreadable or invalid input data.
pub const EXIT_DATA: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {message} (line {line})", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] smoothperc_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_DATA,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
