use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown experiment {0:?}; run `halfspace list` for the ids")]
    UnknownExperiment(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] halfspace::Error),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
