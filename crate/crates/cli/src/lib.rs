//! Library side of the `oqf` binary: file formats, noise simulation, the
//! parallel reconstruction driver and the subcommand implementations. Kept
//! as a library so integration tests can drive the same code paths.

pub mod commands;
pub mod config;
pub mod convergence;
pub mod imageio;
pub mod noise;
pub mod parallel;
pub mod report;
pub mod sino_io;

use std::path::Path;

/// Failure of a subcommand, grouped by exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for bad input, 3 for numerical failure, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 1,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

impl From<oqf_core::Error> for CliError {
    fn from(e: oqf_core::Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
