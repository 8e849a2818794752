use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cut side is empty or covers all vertices")]
    EmptySide,

    #[error("input vector is constant")]
    ConstantInput,

    #[error("weight oracle is not a valid cut function: {0}")]
    NotSubmodular(String),

    #[error("hyperedge arity {arity} exceeds cap {cap}")]
    ArityTooLarge { arity: usize, cap: usize },

    #[error("solver failed to converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("instance size {n} exceeds enumeration budget {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("not a 2-uniform homogeneous hypergraph: {0}")]
    NotGraph(String),

    #[error("hypergraph is disconnected")]
    NotConnected,

    #[error("embedding matrix is numerically zero")]
    DegenerateEmbedding,

    #[error("labels are not binary")]
    LabelArityMismatch,

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("dataset produced no hyperedges")]
    EmptyHypergraph,

    #[error("invalid hypergraph: {0}")]
    InvalidHypergraph(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
