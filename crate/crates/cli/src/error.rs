//! Errors of a CLI run and their exit codes.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid input; exit code 1.
    Input(String),
    /// A construction or verification failed; exit code 2.
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Check(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Check(m) => write!(f, "check failed: {m}"),
        }
    }
}

impl From<bilip_core::Error> for CliError {
    fn from(e: bilip_core::Error) -> Self {
        if e.is_check_failure() {
            CliError::Check(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}
