use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("{0}")]
    InvalidParameter(String),

    #[error("no connected placement found after {attempts} attempts")]
    PlacementFailed { attempts: u32 },

    #[error("node {node} is unreachable from root {root}")]
    Unreachable { node: usize, root: usize },

    #[error("got {got} readings for {expected} nodes")]
    ReadingCountMismatch { got: usize, expected: usize },

    #[error("message budget of {budget} bytes is below the 3-tuple minimum of {minimum}")]
    BudgetTooSmall { budget: u64, minimum: u64 },

    #[error("grid line {line}: {message}")]
    GridParse { line: usize, message: String },

    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Digest(#[from] qdigest::Error),
}
