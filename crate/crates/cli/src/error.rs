use std::fmt;

use illuscope_client::{BenchError, ClientError};
use illuscope_core::evalkit::EvalError;
use illuscope_core::illugen::GenError;
use illuscope_core::ImageError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    /// Invalid configuration, arguments or inputs, detected before work starts.
    Config = 2,
    Data = 3,
    Endpoint = 4,
}

#[derive(Debug)]
pub struct CliError {
    pub code: ExitCode,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: ExitCode::Config,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self {
            code: ExitCode::Data,
            message: message.into(),
        }
    }

    pub fn endpoint(message: impl Into<String>) -> Self {
        Self {
            code: ExitCode::Endpoint,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<GenError> for CliError {
    fn from(e: GenError) -> Self {
        match &e {
            GenError::InvalidParams(_)
            | GenError::IdenticalParams
            | GenError::KindMismatch
            | GenError::Charset(_)
            | GenError::Image(ImageError::MissingGlyph(_) | ImageError::InvalidFont(_)) => CliError::config(e.to_string()),
            _ => CliError::data(e.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match &e {
            EvalError::UnknownKind(_) | EvalError::UnknownMethod(_) | EvalError::EmptyHiddenType => {
                CliError::config(e.to_string())
            }
            EvalError::JudgeUnavailable(_) => CliError::endpoint(e.to_string()),
            _ => CliError::data(e.to_string()),
        }
    }
}

impl From<ClientError> for CliError {
    fn from(e: ClientError) -> Self {
        match &e {
            ClientError::Config(_) => CliError::config(e.to_string()),
            _ => CliError::endpoint(e.to_string()),
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Client(c) => c.into(),
            BenchError::Records(r) => r.into(),
            d @ BenchError::Data { .. } => CliError::data(d.to_string()),
        }
    }
}
