use std::process::ExitCode;

use ssburgers::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("cost guard: {0}")]
    CostGuard(String),

    #[error("runtime instability: {0}")]
    Unstable(String),

    #[error(transparent)]
    Core(CoreError),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Unstable(_) => 3,
            _ => 2,
        })
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

fn is_unstable(e: &CoreError) -> bool {
    match e {
        CoreError::NonFinite { .. } => true,
        CoreError::Trajectory { source, .. } => is_unstable(source),
        _ => false,
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        if is_unstable(&e) {
            CliError::Unstable(e.to_string())
        } else {
            match e {
                CoreError::Io(_) => CliError::Core(e),
                other => CliError::Config(other.to_string()),
            }
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Outcome of a command that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    /// An identity or acceptance check failed (exit 1).
    Fail,
}

impl Outcome {
    pub fn from_passed(passed: bool) -> Self {
        if passed {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    pub fn exit_code(self) -> ExitCode {
        match self {
            Outcome::Pass => ExitCode::SUCCESS,
            Outcome::Fail => ExitCode::from(1),
        }
    }
}
