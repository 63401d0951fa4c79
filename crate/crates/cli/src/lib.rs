//! Deterministic experiment runner for the `wwgm` library.
//!
//! One subcommand per experiment. Data files depend only on the resolved
//! config; run metadata (timing, file list) goes to `manifest.json`.

pub mod config;
pub mod output;
pub mod run;

use serde::Serialize;
use thiserror::Error;

pub use config::{Experiment, ExperimentConfig, Overrides};
pub use run::run;

/// Exit status for a successful run.
pub const EXIT_OK: u8 = 0;
/// Output could not be written.
pub const EXIT_IO: u8 = 1;
/// The config or an input guard rejected the run before numerics finished.
pub const EXIT_VALIDATION: u8 = 2;
/// A computation ran but its accuracy monitor failed.
pub const EXIT_ACCURACY: u8 = 3;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] wwgm::Error),

    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => EXIT_VALIDATION,
            RunError::Core(e) if e.is_accuracy() => EXIT_ACCURACY,
            RunError::Core(_) => EXIT_VALIDATION,
            RunError::Io { .. } => EXIT_IO,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Config(_) => "invalid_config",
            RunError::Core(e) => e.kind(),
            RunError::Io { .. } => "io",
        }
    }

    /// The machine-readable record printed on stderr.
    pub fn record(&self) -> ErrorRecord {
        ErrorRecord { error: self.kind(), message: self.to_string(), exit_code: self.exit_code() }
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub error: &'static str,
    pub message: String,
    pub exit_code: u8,
}
