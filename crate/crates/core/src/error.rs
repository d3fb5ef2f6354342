use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("index {index} out of bounds for extent {extent} (direction {direction})")]
    IndexOutOfBounds {
        index: usize,
        extent: usize,
        direction: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("capacity exceeded: {requested} entries requested, limit is {limit}")]
    Capacity { requested: usize, limit: usize },

    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("internal consistency violated: {0}")]
    InternalConsistency(String),

    #[error("correctness gate failed: {0}")]
    CorrectnessGate(String),

    #[error("I/O failure on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV in {}: {message}", path.display())]
    Csv { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
