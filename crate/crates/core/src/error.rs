use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("duplicate document id {0:?}")]
    DuplicateId(String),

    #[error("document id must be non-empty (line {0})")]
    EmptyId(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("term {term:?} has tf={tf} but df=0")]
    InconsistentStats { term: String, tf: u32 },

    #[error("extraction failed: {0}")]
    Extraction(String),

    #[error("no document has a non-empty keyword bag")]
    EmptyCorpus,

    #[error("topic index {index} out of range for {topics} topics")]
    TopicOutOfRange { index: usize, topics: usize },

    #[error("Gibbs state invariant violated after sweep {sweep}: {message}")]
    Invariant { sweep: usize, message: String },

    #[error("invalid model: {0}")]
    Model(String),

    #[error("no evaluable tokens")]
    NoEvaluableTokens,

    #[error("document {0:?} is not part of the model")]
    UnknownDocument(String),

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
