use std::path::PathBuf;

/// Errors produced by the pseudospectra library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("numerical failure in {operation} ({context})")]
    Numerical { operation: &'static str, context: String },

    #[error(
        "matrix generation gave up after {attempts} draws \
         (symmetric: {symmetric}, ill-conditioned: {ill_conditioned}, numerical: {numerical})"
    )]
    Generation {
        attempts: usize,
        symmetric: usize,
        ill_conditioned: usize,
        numerical: usize,
    },

    #[error("failed to load {what}: {reason}")]
    Load { what: String, reason: String },

    #[error("threshold calibration failed: no candidate reached the recall targets")]
    Calibration,

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn load(what: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Load { what: what.into(), reason: reason.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
