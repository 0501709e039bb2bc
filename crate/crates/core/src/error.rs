use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} is outside the legal range [{min}, {max}]")]
    Range {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("target phase {target_deg}° is outside the achievable span of the cell model")]
    UnreachablePhase { target_deg: f64 },

    #[error("singular geometry: {0}")]
    Singularity(String),

    #[error("schedule error: {0}")]
    Schedule(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("no signal: every response amplitude is zero")]
    NoSignal,

    #[error("circle fit failed: {0}")]
    Fit(String),

    #[error("voltage sweep requires a continuous cell model, got {0}")]
    UnsupportedSweep(String),

    #[error("mode {mode} is incompatible with the {model} cell model")]
    ModeMismatch { mode: String, model: String },

    #[error("{field}: {message}")]
    Validation { field: String, message: String },

    #[error("{path}: parse error{}: {message}", location(*line, *column))]
    Parse {
        path: PathBuf,
        line: Option<usize>,
        column: Option<usize>,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn location(line: Option<usize>, column: Option<usize>) -> String {
    match (line, column) {
        (Some(l), Some(c)) => format!(" at line {l}, column {c}"),
        (Some(l), None) => format!(" at line {l}"),
        _ => String::new(),
    }
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
