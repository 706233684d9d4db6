//! Scenario runner behind the `gkls-contact` binary.

pub mod config;
pub mod runner;
pub mod scenarios;

pub use config::ScenarioConfig;
pub use runner::{run, run_checks, RunOptions, RunReport};

/// Errors surfaced by the command line, each with its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}
