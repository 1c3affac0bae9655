use thiserror::Error;

/// Errors produced by the analysis operations.
#[derive(Debug, Error)]
pub enum Error {
    /// An operation was called with an argument outside its domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// Not enough data to produce the requested quantity.
    #[error("no data: {0}")]
    NoData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
