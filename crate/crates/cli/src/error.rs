use std::fmt;

use serde_json::json;

/// Failure classes, mapped to exit codes 2 and 3.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Unreadable input, bad flag or config.
    Input(String),
    /// A metric or diagnostic failed on valid input.
    Compute(String),
}

impl CliError {
    pub fn input(e: impl fmt::Display) -> Self {
        Self::Input(e.to_string())
    }

    pub fn compute(e: impl fmt::Display) -> Self {
        Self::Compute(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) => 2,
            Self::Compute(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Input(_) => "input",
            Self::Compute(_) => "computation",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Self::Input(m) | Self::Compute(m) => m,
        }
    }

    /// Single-line JSON object written to stderr.
    pub fn to_json_line(&self) -> String {
        json!({ "error": { "kind": self.kind(), "exit_code": self.exit_code(), "message": self.message() } })
            .to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error: {}", self.kind(), self.message())
    }
}

impl std::error::Error for CliError {}
