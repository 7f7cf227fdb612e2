//! Error taxonomy shared by the whole library.
//!
//! The variants mirror the failure classes surfaced by the command-line tool:
//! configuration misuse, data ingestion problems, geometric preconditions
//! (membership, antipodal pairs, space mismatches), and numeric breakdowns
//! (non-convergence, underflow, degenerate inputs).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration or API misuse (bad bounds, empty grids, ...).
    #[error("config: {0}")]
    Config(String),

    /// Data could not be read or failed validation on the way in.
    #[error("ingestion: {0}")]
    Ingestion(String),

    /// A geometric precondition failed (membership, antipodal pair,
    /// non-PD matrix, empty projection target).
    #[error("geometry: {0}")]
    Geometry(String),

    /// Two points from different spaces were combined.
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    /// Iterative numerics failed (non-convergence, underflow, NaN).
    #[error("numeric: {0}")]
    Numeric(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn ingestion(msg: impl Into<String>) -> Self {
        Error::Ingestion(msg.into())
    }

    pub fn geometry(msg: impl Into<String>) -> Self {
        Error::Geometry(msg.into())
    }

    pub fn mismatch(msg: impl Into<String>) -> Self {
        Error::SpaceMismatch(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
