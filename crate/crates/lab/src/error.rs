use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Engine(#[from] fockgibbs::Error),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv failure: {0}")]
    Csv(#[from] csv::Error),
}

impl LabError {
    /// Process exit code: 1 for configuration and output problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) | LabError::Io(_) | LabError::Csv(_) => 1,
            LabError::Engine(fockgibbs::Error::InvalidConfig(_)) => 1,
            LabError::Engine(_) => 2,
        }
    }
}

pub type LabResult<T> = std::result::Result<T, LabError>;
