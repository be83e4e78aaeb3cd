use std::path::PathBuf;

use couette_core::Error as CoreError;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const NUMERICAL: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("malformed input {path}: {message}")]
    Input { path: PathBuf, message: String },

    #[error("{failed} of {total} acceptance criteria failed")]
    SuiteFailed { failed: usize, total: usize },
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn input(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        CliError::Input { path: path.into(), message: message.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Input { .. } => exit::VALIDATION,
            CliError::Io { .. } => exit::IO,
            CliError::SuiteFailed { .. } => exit::NUMERICAL,
            CliError::Core(e) => core_exit_code(e),
        }
    }
}

/// Precondition violations map to 2, solver failures to 3.
pub fn core_exit_code(e: &CoreError) -> i32 {
    match e {
        CoreError::InvalidProfile(_)
        | CoreError::NotOdd { .. }
        | CoreError::NotMonotone { .. }
        | CoreError::NonPositiveB0 { .. }
        | CoreError::GridTooCoarse { .. }
        | CoreError::OutOfRange(_)
        | CoreError::NotNormalized { .. }
        | CoreError::ZeroMeanViolation { .. }
        | CoreError::NonVanishing { .. }
        | CoreError::ExponentOutOfRange { .. }
        | CoreError::BracketInvalid { .. }
        | CoreError::InvalidInput(_) => exit::VALIDATION,
        CoreError::NoConvergence(_)
        | CoreError::UnresolvedField { .. }
        | CoreError::NewtonDiverged { .. }
        | CoreError::BifurcationNotFound { .. }
        | CoreError::DegenerateHessian { .. }
        | CoreError::OscillationUnresolved { .. }
        | CoreError::NonPositiveNorm { .. } => exit::NUMERICAL,
    }
}
