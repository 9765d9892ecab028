use thiserror::Error;

use crate::config::ConfigError;

/// Failures of a subcommand, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, unreadable or malformed config. Exit code 2.
    #[error("{0}")]
    Usage(String),

    /// A computation failed or a check did not pass. Exit code 1.
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 1,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Errors from building a model out of a config are config errors; anything
/// else raised by the library is numerical.
pub fn setup(e: ostro::Error) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn numerical(e: ostro::Error) -> CliError {
    CliError::Numerical(e.to_string())
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}
