use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the library. [`Error::exit_code`] maps them onto the CLI
/// exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid arrangement: {0}")]
    InvalidArrangement(String),
    #[error("arrangement is not spanning")]
    NotSpanning,
    #[error("index triple {0:?} is not a basis")]
    NotBasis([usize; 3]),
    #[error("numerical degeneracy in {stage}: {detail}")]
    Degenerate { stage: &'static str, detail: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("covector sets differ")]
    CovectorMismatch,
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn degenerate(stage: &'static str, detail: impl Into<String>) -> Self {
        Error::Degenerate { stage, detail: detail.into() }
    }

    pub(crate) fn invalid(detail: impl Into<String>) -> Self {
        Error::InvalidArrangement(detail.into())
    }

    /// 1 for invalid arrangements, 2 for numerical degeneracy, 3 for bad usage.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArrangement(_)
            | Error::NotSpanning
            | Error::NotBasis(_)
            | Error::CovectorMismatch => 1,
            Error::Degenerate { .. } => 2,
            Error::InvalidInput(_) | Error::Io { .. } | Error::Json(_) => 3,
        }
    }
}
