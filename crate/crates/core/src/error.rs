use thiserror::Error;

use crate::model::Slot;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid token {0:?}")]
    InvalidToken(String),
    #[error("empty {0} slot")]
    EmptySlot(Slot),
    #[error("duplicate sentence id {0:?}")]
    DuplicateSentence(String),
    #[error("unknown sentence id {0:?}")]
    UnknownSentence(String),
    #[error("duplicate synset id {0:?}")]
    DuplicateSynset(String),
    #[error("unknown synset id {0:?}")]
    UnknownSynset(String),
    #[error("synset {0:?} has no patterns")]
    EmptySynset(String),
    #[error("pattern error at token {position}: {message}")]
    Pattern { position: usize, message: String },
    #[error("expansion of {bound} triples exceeds the cap of {cap}")]
    Capacity { bound: u128, cap: usize },
    #[error("line {line}, column {column}: {source}")]
    Parse {
        line: usize,
        column: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("{0}")]
    Format(String),
    #[error("sentence sets differ: {0}")]
    SentenceMismatch(String),
}

impl Error {
    pub(crate) fn at(self, line: usize, column: usize) -> Error {
        Error::Parse {
            line,
            column,
            source: Box::new(self),
        }
    }

    pub(crate) fn pattern(position: usize, message: impl Into<String>) -> Error {
        Error::Pattern {
            position,
            message: message.into(),
        }
    }
}
