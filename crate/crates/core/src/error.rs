use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parent mismatch: {0}")]
    ParentMismatch(String),
    #[error("subgroup is not in canonical form")]
    NotCanonical,
    #[error("not admissible: {0}")]
    NotAdmissible(String),
    #[error("measure must be nonzero")]
    ZeroMeasure,
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("cutoff exceeded: {0}")]
    Cutoff(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
