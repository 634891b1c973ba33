use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A record does not match its declared schema.
    #[error("schema violation in {record}: {message}")]
    Schema { record: String, message: String },

    /// A record points at an entity, issue, document or event that does not exist.
    #[error("referential integrity violation in {record}: {message}")]
    Integrity { record: String, message: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("no embedding stored under key {0:?}")]
    MissingEmbedding(String),

    #[error("embedding provider error: {0}")]
    Provider(String),

    #[error("query references unknown ids: {}", .0.join(", "))]
    Resolution(Vec<String>),

    #[error("graph error: {0}")]
    Graph(String),

    #[error("cannot encode node {node}: {reason}")]
    Encode { node: String, reason: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("evaluation error: {0}")]
    Evaluation(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn schema(record: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            record: record.into(),
            message: message.into(),
        }
    }

    pub(crate) fn integrity(record: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Integrity {
            record: record.into(),
            message: message.into(),
        }
    }
}
