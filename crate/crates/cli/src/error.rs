use std::fmt;

use serde::Serialize;

/// Failure of a CLI run, split by exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, out-of-range parameters or unreadable input (exit 2).
    Config(String),
    /// A numerical stage failed on valid input (exit 3).
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numerical(_) => "numerical",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numerical(m) => m,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error: {}", self.kind(), self.message())
    }
}

impl std::error::Error for CliError {}

impl From<zbw_core::Error> for CliError {
    fn from(e: zbw_core::Error) -> Self {
        match e {
            zbw_core::Error::Io(_) | zbw_core::Error::Csv(_) | zbw_core::Error::Json(_) => {
                CliError::Config(e.to_string())
            }
            e if e.is_config_error() => CliError::Config(e.to_string()),
            e => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

#[derive(Serialize)]
struct ErrorLine<'a> {
    error: &'a str,
    exit_code: u8,
    message: &'a str,
}

/// One-line JSON description of the failure.
pub fn error_line(e: &CliError) -> String {
    serde_json::to_string(&ErrorLine {
        error: e.kind(),
        exit_code: e.exit_code(),
        message: e.message(),
    })
    .unwrap_or_else(|_| format!("{{\"error\":\"{}\"}}", e.kind()))
}

pub fn report_error(e: &CliError) {
    eprintln!("{}", error_line(e));
}
