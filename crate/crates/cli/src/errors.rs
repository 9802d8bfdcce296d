//! CLI error taxonomy mapped to scriptable exit codes:
//! 0 success, 2 infeasible strategy, 3 fit failure, 4 I/O, 1 anything else.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CmdError {
    #[error("strategy infeasible: {0}")]
    Infeasible(String),
    #[error("fit failure: {0}")]
    Fit(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("{0}")]
    Other(String),
}

impl CmdError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CmdError::Infeasible(_) => 2,
            CmdError::Fit(_) => 3,
            CmdError::Io(_) => 4,
            CmdError::Other(_) => 1,
        }
    }
}

impl From<measure_change::Error> for CmdError {
    fn from(e: measure_change::Error) -> Self {
        use measure_change::Error as E;
        match e {
            E::Io(_) | E::Csv(_) => CmdError::Io(e.to_string()),
            E::Fit { .. } | E::InvalidCatalog(_) | E::DataOutsideSupport { .. } => {
                CmdError::Fit(e.to_string())
            }
            other => CmdError::Other(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CmdError {
    fn from(e: serde_json::Error) -> Self {
        CmdError::Io(e.to_string())
    }
}
