use thiserror::Error;

pub type Result<T, E = AnnotateError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum AnnotateError {
    #[error("{0} not found")]
    NotFound(String),
    #[error("revision conflict: expected {expected}, current {current}")]
    Conflict { expected: u64, current: u64 },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Gold(#[from] benchie::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Corrupt {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}
