use std::path::{Path, PathBuf};

use evcascade::experiments::ExperimentError;
use evcascade::mobility::MobilityError;
use evcascade::proximity_net::NetError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Empty(String),
    #[error("{0}")]
    Verification(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Empty(_) => 3,
            CliError::Verification(_) => 4,
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::NoSuitableAgents => CliError::Empty(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<NetError> for CliError {
    fn from(e: NetError) -> Self {
        match e {
            NetError::DegenerateFleet(_) | NetError::Vanished => CliError::Empty(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<MobilityError> for CliError {
    fn from(e: MobilityError) -> Self {
        CliError::Usage(e.to_string())
    }
}
