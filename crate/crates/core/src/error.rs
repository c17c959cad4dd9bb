use thiserror::Error;

use crate::roadmap::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: parse error: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: schema violation: {message}")]
    Schema { line: usize, message: String },

    #[error("invalid value: {0}")]
    Invalid(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("unknown payload schema: {0}")]
    UnknownPayload(String),

    #[error("{violations} of {checked} tuples violate the contrastive property (tolerance {tolerance})")]
    ContrastiveViolation {
        violations: usize,
        checked: usize,
        tolerance: f64,
    },

    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    #[error("unknown state: no roadmap node has key {0}")]
    UnknownState(String),

    #[error("domain {domain}: no feasible action from any reachable state")]
    NoFeasibleAction { domain: String },

    #[error("unknown domain {0:?}")]
    UnknownDomain(String),

    #[error("unknown action label {0:?}")]
    UnknownAction(String),

    #[error("unknown agent {0:?}")]
    UnknownAgent(String),

    #[error("roadmap layer {0} has not been built")]
    LayerMissing(&'static str),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
