use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("protocol violation: {0}")]
    ProtocolViolation(String),

    #[error("malformed check disclosure: {0}")]
    MalformedDisclosure(String),

    #[error("authenticity violation: {0}")]
    AuthenticityViolation(String),

    #[error("adversary configuration error: {0}")]
    Configuration(String),

    #[error("enumeration of {size} branches exceeds the limit of {limit}")]
    EnumerationTooLarge { size: u128, limit: u128 },
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
