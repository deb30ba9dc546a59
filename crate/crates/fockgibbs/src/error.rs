use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("sector dimension {dim} exceeds the cap of {cap}")]
    ResourceLimit { dim: usize, cap: usize },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    #[error("support mismatch: {0}")]
    SupportMismatch(String),
    #[error("unsupported order k = {0}")]
    UnsupportedOrder(usize),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("support violation: {0}")]
    SupportViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
