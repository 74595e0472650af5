use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid lattice size: {0}")]
    InvalidSize(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("construction error: {0}")]
    Construction(String),
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("mapping domain error: {0}")]
    Domain(String),
    #[error("inconsistent syndrome: {0}")]
    Consistency(String),
    #[error("odd number of defects for species {0}")]
    Parity(usize),
    #[error("unknown charge: {0}")]
    UnknownCharge(String),
    #[error("ill-defined charge: {0}")]
    IllDefinedCharge(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
