use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    ReadConfig { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    ParseConfig { path: PathBuf, source: serde_json::Error },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Numerical(#[from] nehari_core::Error),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    /// 2 for configuration problems, 1 for everything that went wrong
    /// after the configuration was accepted.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ReadConfig { .. } | CliError::ParseConfig { .. } | CliError::InvalidConfig(_) => 2,
            CliError::Numerical(nehari_core::Error::InvalidParams(_) | nehari_core::Error::InvalidGrid(_)) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
