use twinbeam_oracle::OracleError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("oracle mismatch: {failed} of {total} comparisons outside tolerance")]
    OracleMismatch { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::OracleMismatch { .. } => 4,
        }
    }
}

impl From<twinbeam::Error> for CliError {
    fn from(e: twinbeam::Error) -> Self {
        match e {
            twinbeam::Error::Config(_) | twinbeam::Error::InvalidParameter { .. } => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Core(inner) => inner.into(),
            OracleError::Budget { .. } => CliError::Config(e.to_string()),
            OracleError::Truncation { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
