use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed N-Triples statement at line {line}: {excerpt}")]
    MalformedLine { line: usize, excerpt: String },

    #[error("distributional matrix has no columns")]
    EmptyMatrix,

    #[error("entity {0} is not a row of the matrix")]
    UnknownEntity(String),

    #[error("node {0} is not in the graph or taxonomy")]
    UnknownNode(String),

    #[error("context column {0} is missing from the score table (pass the unreduced matrix)")]
    MissingColumn(String),

    #[error("cannot build a taxonomy over an empty graph")]
    DegenerateGraph,

    #[error("walk reached a node without neighbours")]
    EmptyNeighborhood,

    #[error("no node with neighbours to start a walk from")]
    NoEligibleStart,

    #[error("sample stream is missing configuration {0}")]
    IncompleteGrid(String),

    #[error("profiles were computed over different grids: {0}")]
    GridMismatch(String),

    #[error("classification needs at least 3 datasets, got {0}")]
    TooFewDatasets(usize),

    #[error("cache file {path}: {reason}")]
    Cache { path: PathBuf, reason: String },

    #[error("cannot access {}", path.display())]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::File { path: path.into(), source }
    }
}
