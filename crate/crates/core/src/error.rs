use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by front ends to pick an exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Data,
    Config,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("hyperedge {edge} is empty")]
    EmptyHyperedge { edge: usize },
    #[error("node id {node} out of range for {num_nodes} nodes")]
    NodeOutOfRange { node: usize, num_nodes: usize },
    #[error("expected two distinct nodes, got {node} twice")]
    SameNode { node: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("node {node} is not a candidate")]
    NotACandidate { node: usize },
    #[error("node {node} is already a seed")]
    AlreadySeeded { node: usize },
    #[error("budget {budget} exceeds candidate pool of {pool}")]
    BudgetExceedsPool { budget: usize, pool: usize },
    #[error("budget must be at least 1")]
    ZeroBudget,
    #[error("{which} normalizer is zero ({hint})")]
    ZeroNormalizer {
        which: &'static str,
        hint: &'static str,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Dataset { path: PathBuf, message: String },
    #[error("{0}")]
    MissingData(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. } | Error::Json { .. } => ErrorKind::Parse,
            Error::Io { .. } => ErrorKind::Io,
            Error::InvalidParameter { .. }
            | Error::BudgetExceedsPool { .. }
            | Error::ZeroBudget
            | Error::ZeroNormalizer { .. } => ErrorKind::Config,
            _ => ErrorKind::Data,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must lie in [0, 1]",
        });
    }
    Ok(())
}
