//! Experiment runner for `stablematch-core`: one subcommand per study,
//! reproducible CSV and JSON output, and the acceptance suite.

use std::path::PathBuf;

pub mod args;
pub mod experiments;
pub mod output;
pub mod run;
pub mod verify;

pub use run::{run, RunOutput};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] stablematch_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// Process exit code: 2 for anything the invocation got wrong, 1 for a
    /// failure while writing output.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(_) => 2,
            CliError::Io { .. } => 1,
        }
    }
}
