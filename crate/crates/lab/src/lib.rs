//! Batch driver for `contraction-core`: JSON/CSV formats and the
//! `validate` / `classify` / `iterate` / `bounds` / `search` commands.

pub mod commands;
pub mod formats;
pub mod schema;

use contraction_core::solver::SolverError;
use contraction_core::space::SpaceError;
use contraction_core::{MapError, PhiError, SearchError};
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

pub use commands::{execute, run_command, Cli};

/// Environment variable that overrides `--seed`.
pub const SEED_ENV: &str = "CONTRACTION_LAB_SEED";

#[derive(Debug, Error)]
pub enum LabError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid {what} JSON: {message}")]
    Json { what: &'static str, message: String },
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Phi(#[from] PhiError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("csv: {0}")]
    Csv(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    /// An inequality or axiom fails on the given data.
    Violation,
    /// The data is fine but no theorem covers it.
    NotApplicable,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Violation | Status::NotApplicable => 1,
            Status::Error => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommandResult {
    pub command: String,
    pub status: Status,
    pub payload: Value,
    /// CSV rendering requested with `--format csv`.
    #[serde(skip)]
    pub csv: Option<String>,
}

impl CommandResult {
    pub fn error(command: &str, err: &dyn std::fmt::Display) -> Self {
        CommandResult {
            command: command.to_string(),
            status: Status::Error,
            payload: serde_json::json!({ "error": err.to_string() }),
            csv: None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    /// Text written to stdout: the CSV table when one was requested and
    /// produced, the pretty JSON envelope otherwise.
    pub fn render(&self) -> String {
        match &self.csv {
            Some(table) => table.clone(),
            None => {
                let mut s = serde_json::to_string_pretty(self).expect("JSON values serialize");
                s.push('\n');
                s
            }
        }
    }
}
