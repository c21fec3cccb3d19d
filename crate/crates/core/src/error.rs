use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("node index {index} out of range for graph with {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("self-loop on node {0}")]
    SelfLoop(usize),

    #[error("graph is disconnected: no path between nodes {from} and {to}")]
    GraphDisconnected { from: usize, to: usize },

    #[error("correlation undefined: {0} distance vector is constant")]
    ConstantInput(&'static str),

    #[error("symmetric eigensolver did not converge: {0}")]
    EigenFailure(String),

    #[error(
        "Vietoris-Rips complex too large: about {estimated} coface candidates exceed the budget of {budget}; subsample the input"
    )]
    CapacityExceeded { estimated: u64, budget: u64 },

    #[error("stub matching failed after {restarts} restarts")]
    MatchingFailure { restarts: usize },

    #[error("{path}:{line}:{column}: {message}")]
    MalformedInput {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by the data or files supplied rather than by a
    /// numerical breakdown.
    pub fn is_data_error(&self) -> bool {
        !matches!(self, Error::EigenFailure(_))
    }
}
