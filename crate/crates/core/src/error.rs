use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("generation failed: {0}")]
    GenerationFailure(String),

    /// Newton continuation along a boundary gave up; `last_good_phi` is the
    /// last parameter value with an accepted solution.
    #[error("continuation failed after phi = {last_good_phi}: {reason}")]
    ContinuationFailure { last_good_phi: f64, reason: String },

    #[error("point lies outside the predicted support")]
    OutsideSupport,

    #[error("eigensolver failed on a {n}x{n} matrix: {reason}")]
    EigensolverFailure { n: usize, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("complexity guard: {0}")]
    ComplexityGuard(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn spec(msg: impl Into<String>) -> Self {
        Error::InvalidSpec(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
