//! Library half of the experiment harness: configuration, experiment
//! execution, artifact output, and the named analysis suites. The binary in
//! `main.rs` is a thin argument-parsing shell over these functions.

pub mod config;
pub mod experiment;
pub mod output;
pub mod suites;

use thiserror::Error;

/// Failure classes with fixed process exit codes: configuration problems
/// exit 2, numerical failures mid-run exit 3, failed suite checks exit 4.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("suite failure: {0}")]
    Suite(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        CliError::Numerical(msg.into())
    }

    pub fn suite(msg: impl Into<String>) -> Self {
        CliError::Suite(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Suite(_) => 4,
        }
    }
}
