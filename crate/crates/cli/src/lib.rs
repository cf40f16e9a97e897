//! Batch front-end: one config file drives one run.

pub mod run;
pub mod spec;

use thiserror::Error;

pub use run::{render, run, RunOptions};
pub use spec::{load, parse, Format, RunSpec, TASKS};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid spec:\n  - {}", .0.join("\n  - "))]
    Validation(Vec<String>),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Runtime(_) => 1,
        }
    }
}
