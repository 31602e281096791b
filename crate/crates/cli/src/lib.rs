//! Command-line driver: configuration, dispatch, artifacts and the class-group cache.

pub mod cache;
pub mod commands;
pub mod config;
pub mod output;

use std::fmt;

pub use commands::{run, Outcome};
pub use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration or parameters; exit status 2.
    Config(String),
    /// A census invariant or requested check failed; exit status 1.
    Integrity(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Integrity(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Integrity(_) => "integrity",
            CliError::Io(_) => "io",
        }
    }

    /// Machine-readable diagnostic.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "status": "error",
            "kind": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Integrity(m) => write!(f, "integrity failure: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<heegner_core::error::Error> for CliError {
    fn from(e: heegner_core::error::Error) -> Self {
        use heegner_core::error::Error as E;
        match e {
            E::Integrity(m) => CliError::Integrity(m),
            other => CliError::Config(other.to_string()),
        }
    }
}
