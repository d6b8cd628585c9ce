use thiserror::Error;

use crate::types::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Raised by zone assignment when the default policy forbids dropping nodes.
    #[error("disconnected topology: {} node(s) unreachable from the gateway ({})", .unreachable.len(), list_ids(.unreachable))]
    DisconnectedTopology { unreachable: Vec<NodeId> },

    #[error("routing inconsistency: node {0} has no neighbor in the next lower zone")]
    Routing(NodeId),

    #[error("invalid scheduling table {name}: {violations}")]
    InvalidTable { name: String, violations: String },

    #[error("line {line}: {key}: {message}")]
    Config {
        line: usize,
        key: String,
        message: String,
    },

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("sweep tuple {tuple}: {source}")]
    Sweep {
        tuple: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: malformed data: {message}")]
    Data { path: String, message: String },
}

/// Broad failure category, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Simulation,
    Io,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidArgument(_)
            | Error::Config { .. }
            | Error::InvalidTable { .. }
            | Error::Scenario(_) => ErrorKind::Config,
            Error::DisconnectedTopology { .. } | Error::Routing(_) => ErrorKind::Simulation,
            Error::Sweep { source, .. } => source.kind(),
            Error::Io { .. } | Error::Csv { .. } | Error::Data { .. } => ErrorKind::Io,
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    pub(crate) fn csv(path: impl AsRef<std::path::Path>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

fn list_ids(ids: &[NodeId]) -> String {
    const SHOWN: usize = 8;
    let mut out = ids
        .iter()
        .take(SHOWN)
        .map(|id| id.to_string())
        .collect::<Vec<_>>()
        .join(", ");
    if ids.len() > SHOWN {
        out.push_str(", ...");
    }
    out
}
