use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// How an error should be classified by callers that map failures to
/// process exit codes: bad input versus a numerical breakdown at runtime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed dataset: {0}")]
    Dataset(String),
    #[error("self-loop on node {node} in snapshot {snapshot}")]
    SelfLoop { node: usize, snapshot: usize },
    #[error("duplicate edge ({u}, {v}) in snapshot {snapshot}")]
    DuplicateEdge { u: usize, v: usize, snapshot: usize },
    #[error("node id {node} out of range for {num_nodes} nodes (snapshot {snapshot})")]
    NodeOutOfRange {
        node: usize,
        num_nodes: usize,
        snapshot: usize,
    },
    #[error("negative weight {weight} on edge ({u}, {v}) in snapshot {snapshot}")]
    NegativeWeight {
        u: usize,
        v: usize,
        weight: f64,
        snapshot: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("aggregation window {window} exceeds snapshot count {len}")]
    WindowTooLarge { window: usize, len: usize },
    #[error("snapshot {snapshot} has no edges; invariant measure undefined")]
    EmptyGraph { snapshot: usize },
    #[error("encoding mismatch: {0}")]
    EncodingMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),
    #[error("snapshot {snapshot} has zero similarity to all others; bandwidth is far too small")]
    ZeroSimilarityRow { snapshot: usize },
    #[error("k-means needs {k} clusters but only {distinct} distinct rows exist")]
    TooFewDistinctRows { k: usize, distinct: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("simulation diverged at step {step} (agent {agent})")]
    Diverged { step: usize, agent: usize },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. }
            | Error::Dataset(_)
            | Error::SelfLoop { .. }
            | Error::DuplicateEdge { .. }
            | Error::NodeOutOfRange { .. }
            | Error::NegativeWeight { .. }
            | Error::InvalidParameter(_)
            | Error::WindowTooLarge { .. }
            | Error::EmptyGraph { .. }
            | Error::EncodingMismatch(_)
            | Error::DimensionMismatch(_)
            | Error::TooFewDistinctRows { .. } => ErrorKind::Validation,
            Error::DegenerateSpectrum(_)
            | Error::ZeroSimilarityRow { .. }
            | Error::Numerical(_)
            | Error::Diverged { .. } => ErrorKind::Numerical,
        }
    }
}
