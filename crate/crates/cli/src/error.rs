use lbd::LbdError;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{message}")]
    Param { kind: &'static str, message: String },
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn param(message: impl Into<String>) -> Self {
        CliError::Param { kind: "parameter", message: message.into() }
    }

    pub fn io(context: impl std::fmt::Display, err: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{context}: {err}"))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Param { .. } => 2,
            CliError::Io(_) => 3,
        }
    }

    /// One JSON object on one line.
    pub fn line(&self) -> String {
        let (kind, message) = match self {
            CliError::Param { kind, message } => (*kind, message.as_str()),
            CliError::Io(message) => ("io", message.as_str()),
        };
        json!({ "error": kind, "message": message }).to_string()
    }
}

impl From<LbdError> for CliError {
    fn from(e: LbdError) -> Self {
        let kind = match e {
            LbdError::Parameter(_) => "parameter",
            LbdError::Index { .. } => "index",
            LbdError::Irreducible(_) => "irreducible",
            LbdError::DegenerateBoundary(_) => "degenerate_boundary",
            LbdError::Degenerate(_) => "degenerate",
            LbdError::Window { .. } => "window",
            LbdError::NotApplicable(_) => "not_applicable",
            LbdError::TooManyEvents(_) => "too_many_events",
        };
        CliError::Param { kind, message: e.to_string() }
    }
}

pub type CliResult<T> = Result<T, CliError>;
