//! Library side of the `oscint` command: every subcommand is a function from parsed
//! input to a [`RunRecord`], so runs can be scripted, tested and replayed in-process.

pub mod commands;
pub mod input;
pub mod record;

use std::fmt;

pub use commands::{degeneracy, replay, resolve, sweep, Outcome, ReplayReport, SweepOptions};
pub use record::RunRecord;

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Input = 1,
    Genericity = 2,
    Convergence = 3,
    ReplayMismatch = 4,
}

impl Exit {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug)]
pub struct CliError {
    pub exit: Exit,
    pub message: String,
    pub detail: Option<serde_json::Value>,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            exit: Exit::Input,
            message: message.into(),
            detail: None,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<oscint_core::Error> for CliError {
    fn from(e: oscint_core::Error) -> Self {
        use oscint_core::Error as E;
        let exit = match e {
            E::GenericityFailure { .. } | E::HypothesisViolated(_) => Exit::Genericity,
            E::NodeCapExceeded { .. } => Exit::Convergence,
            _ => Exit::Input,
        };
        CliError {
            exit,
            message: e.to_string(),
            detail: None,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub const TOOL_VERSION: &str = concat!("oscint ", env!("CARGO_PKG_VERSION"));
