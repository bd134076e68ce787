use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("line {line}: vertex id {id} out of range for n = {n}")]
    Range { line: usize, id: usize, n: usize },
    #[error("line {line}: self-loop on vertex {v}")]
    SelfLoop { line: usize, v: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{what}: n = {n} exceeds limit {limit}")]
    TooLarge { what: &'static str, n: usize, limit: usize },
    #[error("incompatible sketches: {0}")]
    Incompatible(String),
    #[error("decode error: {0}")]
    Decode(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
