use std::path::PathBuf;

use filament_core::dynamics::{CflViolation, DynamicsError};
use filament_core::exact::ExactError;
use filament_core::grid::GridError;
use filament_core::selfsimilar::SelfSimilarError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("CFL violation: tau K^2 / L^2 = {:.4} >= pi (tau = {})", .0.cfl_number, .0.tau)]
    Cfl(CflViolation),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Cfl(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::Io { .. } => 5,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<GridError> for CliError {
    fn from(e: GridError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::Cfl(v) => CliError::Cfl(v),
            DynamicsError::Config(msg) => CliError::Config(msg),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<ExactError> for CliError {
    fn from(e: ExactError) -> Self {
        match e {
            ExactError::Domain(msg) => CliError::Config(msg),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<SelfSimilarError> for CliError {
    fn from(e: SelfSimilarError) -> Self {
        match e {
            SelfSimilarError::Domain(msg) => CliError::Config(msg),
            other => CliError::Numerical(other.to_string()),
        }
    }
}
