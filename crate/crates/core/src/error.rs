use thiserror::Error;

/// Errors raised while building models or running solvers and reports.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("path {path} of source {source_index} references nonexistent node {node}")]
    NonexistentNode {
        source_index: usize,
        path: usize,
        node: usize,
    },

    #[error("path {path} of source {source_index} references nonexistent edge {edge}")]
    NonexistentEdge {
        source_index: usize,
        path: usize,
        edge: usize,
    },

    #[error("path {path} of source {source_index}: {reason}")]
    InvalidPath {
        source_index: usize,
        path: usize,
        reason: String,
    },

    #[error("invalid cost model: {0}")]
    InvalidCostModel(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("decision maker index {index} out of range (have {count})")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "iterates diverged (non-finite or unbounded) at step size {step_size}; try a smaller step"
    )]
    Divergence { step_size: f64 },

    #[error("solver did not converge: {0}")]
    NotConverged(String),

    #[error("no multi-start run converged ({starts} starts)")]
    NoConvergedRuns { starts: usize },

    #[error("empty point set")]
    EmptySet,

    #[error("scenario parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
