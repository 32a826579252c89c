use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("spectrum ledger: {0}")]
    Spectrum(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("vertex {0} does not exist")]
    InvalidVertex(u32),

    #[error("source and target are the same vertex {0}")]
    SameEndpoints(u32),

    #[error("network is disconnected")]
    Disconnected,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("search budget exhausted after {pops} pops")]
    BudgetExceeded { pops: u64 },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
