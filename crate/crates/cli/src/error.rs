use serde::Serialize;
use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),

    #[error("calibration failed: {message}")]
    Calibration { message: String, achievable: Option<(f64, f64)> },

    #[error(transparent)]
    Core(#[from] trochoid::Error),

    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Machine-readable error written to standard error.
#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub kind: &'static str,
    pub message: String,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub achievable: Option<(f64, f64)>,
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn file(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::File { path: path.display().to_string(), source }
    }

    /// 2 for anything the user can fix in the config or flags, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Calibration { .. } | CliError::Json(_) => 2,
            CliError::Core(trochoid::Error::InvalidSpec(_)) => 2,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        use trochoid::Error as E;
        match self {
            CliError::Config(_) | CliError::Json(_) => "invalid-config",
            CliError::Calibration { .. } => "calibration",
            CliError::File { .. } => "io",
            CliError::Core(e) => match e {
                E::InvalidSpec(_) => "invalid-spec",
                E::GenerationFailure(_) => "generation-failure",
                E::ContinuationFailure { .. } => "continuation-failure",
                E::OutsideSupport => "outside-support",
                E::EigensolverFailure { .. } => "eigensolver-failure",
                E::InvalidInput(_) => "invalid-input",
                E::ComplexityGuard(_) => "complexity-guard",
                E::Parse { .. } => "parse",
                E::Io(_) => "io",
                E::Json(_) => "json",
            },
        }
    }

    pub fn report(&self) -> ErrorReport {
        let line = match self {
            CliError::Core(trochoid::Error::Parse { line, .. }) => Some(*line),
            CliError::Json(e) => Some(e.line()),
            _ => None,
        };
        let achievable = match self {
            CliError::Calibration { achievable, .. } => *achievable,
            _ => None,
        };
        ErrorReport { kind: self.kind(), message: self.to_string(), exit_code: self.exit_code(), line, achievable }
    }
}
