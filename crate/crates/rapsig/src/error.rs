use std::fmt;
use std::path::Path;
use std::process::ExitCode;

use rapsig_core::Error as CoreError;

/// Exit status classes of the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Failure {
    /// Unreadable or invalid input, unsupported combinations.
    Input,
    /// Quadrature, root finding or tail truncation failed.
    Numeric,
    /// A reproduction or cross-check disagreed with its reference.
    Mismatch,
}

impl Failure {
    pub fn exit_code(self) -> u8 {
        match self {
            Failure::Input => 1,
            Failure::Numeric => 2,
            Failure::Mismatch => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub failure: Failure,
    pub message: String,
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { failure: Failure::Input, message: message.into() }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        CliError { failure: Failure::Numeric, message: message.into() }
    }

    pub fn mismatch(message: impl Into<String>) -> Self {
        CliError { failure: Failure::Mismatch, message: message.into() }
    }

    /// Wraps a core error raised while handling `field` of `file`.
    pub fn at(file: &Path, field: &str, err: CoreError) -> Self {
        let mut e = CliError::from(err);
        e.message = format!("{}: field `{field}`: {}", file.display(), e.message);
        e
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.failure.exit_code())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        let failure = match err {
            CoreError::Input(_) | CoreError::Capacity { .. } | CoreError::Unsupported(_) => Failure::Input,
            CoreError::Domain(_) | CoreError::Numeric(_) => Failure::Numeric,
        };
        CliError { failure, message: err.to_string() }
    }
}
