//! Library surface of the experiment CLI; `main` is a thin wrapper so the
//! commands stay testable in-process.

use thiserror::Error;

pub mod commands;
pub mod config;

pub use commands::{execute_bounds, execute_replay, execute_run, CommandOutput};
pub use config::{load_config, resolve, ConfigFile, ResolvedConfig};

/// CLI failures, split by exit status: validation problems (anything
/// detectable before work starts, including unreadable input files) exit
/// with 2, runtime failures with 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}
