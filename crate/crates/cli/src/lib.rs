//! Batch front-end for the `ostro` library: scenario runs, residual check
//! suites and numerical dualization tables.

pub mod check;
pub mod config;
pub mod dualize;
pub mod error;
pub mod run;

use std::path::Path;

pub use error::CliError;

/// Reads a config file; unreadable files are usage errors.
pub fn read_config(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Fails with a usage error when `OSTRO_FD_STEP` is set to garbage.
pub fn check_environment() -> Result<(), CliError> {
    ostro::fd::step_env().map(|_| ()).map_err(error::setup)
}

pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
