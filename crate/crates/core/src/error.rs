use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no admissible direction pair for the dipole at {0:?}")]
    NoAdmissiblePair([f64; 3]),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("direction system is singular (|det| = {0:e})")]
    SingularSystem(f64),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
