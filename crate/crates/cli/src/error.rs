use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;
use xyz_core::XyzError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Data(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    #[error("{0}")]
    Guard(String),

    #[error(transparent)]
    Core(#[from] XyzError),
}

impl CliError {
    /// 2 usage, 3 data, 4 guard exceeded, 5 solver failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) | CliError::Io { .. } => 3,
            CliError::Guard(_) => 4,
            CliError::Core(e) => match e {
                XyzError::InvalidParameter(_) | XyzError::Underflow { .. } => 2,
                XyzError::GuardExceeded(_) => 4,
                XyzError::NoConvergence { .. } => 5,
                _ => 3,
            },
        }
    }

    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
