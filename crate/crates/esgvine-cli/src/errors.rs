//! Error taxonomy and exit codes.
//!
//! Every failure is folded into one of three buckets so scripts can
//! branch on the exit status: 2 — the configuration (file or flags) is
//! invalid; 3 — input data, handoff files, or archives are missing or
//! malformed; 4 — a numerical routine failed during fitting.

use std::path::Path;

use esgvine::copula::CopulaError;
use esgvine::marginals::MarginalError;
use esgvine::panel::PanelError;
use esgvine::store::StoreError;
use esgvine::vine::VineError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }

    /// Wraps an I/O error with the path it concerned.
    pub fn io(path: &Path, err: std::io::Error) -> CliError {
        CliError::Data(format!("{}: {err}", path.display()))
    }
}

impl From<PanelError> for CliError {
    fn from(e: PanelError) -> CliError {
        match e {
            PanelError::BadPeriodSpec { .. } | PanelError::BadLevel(_) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<StoreError> for CliError {
    fn from(e: StoreError) -> CliError {
        CliError::Data(e.to_string())
    }
}

impl From<MarginalError> for CliError {
    fn from(e: MarginalError) -> CliError {
        CliError::Numeric(e.to_string())
    }
}

impl From<CopulaError> for CliError {
    fn from(e: CopulaError) -> CliError {
        CliError::Numeric(e.to_string())
    }
}

impl From<VineError> for CliError {
    fn from(e: VineError) -> CliError {
        CliError::Numeric(e.to_string())
    }
}
