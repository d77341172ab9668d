use facered::facial::FacialError;
use facered::rigidity::RigidityError;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cannot access {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io { .. } => EXIT_PARSE,
            CliError::Infeasible(_) => EXIT_FAILED,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<FacialError> for CliError {
    fn from(e: FacialError) -> Self {
        match e {
            FacialError::Invalid(_) | FacialError::Cone(_) => CliError::Parse(e.to_string()),
            FacialError::Infeasible => CliError::Infeasible(e.to_string()),
            FacialError::NumericalFailure { .. } | FacialError::OracleExhausted { .. } | FacialError::Sdp(_) | FacialError::Numerics(_) => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

impl From<RigidityError> for CliError {
    fn from(e: RigidityError) -> Self {
        match e {
            RigidityError::Invalid(_) | RigidityError::Degenerate(_) => CliError::Parse(e.to_string()),
            RigidityError::FormsDisagree { .. } => CliError::Numerical(e.to_string()),
            RigidityError::Facial(inner) => inner.into(),
        }
    }
}
