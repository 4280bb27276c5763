//! Error type shared by every module in the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A requested size exceeds an implementation ceiling.
    #[error("capacity: {0}")]
    Capacity(String),

    /// An index or evaluation point lies outside the backing data.
    #[error("range: {0}")]
    Range(String),

    /// An argument violates a precondition.
    #[error("argument: {0}")]
    Argument(String),

    /// An input file does not conform to the documented format.
    #[error("format: {0}")]
    Format(String),

    /// A line of an input file could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A factor that must be non-zero vanished.
    #[error("singularity: {0}")]
    Singularity(String),

    /// A computed value violates an internal consistency bracket; this
    /// signals a table or normalization bug rather than bad user input.
    #[error("consistency: {0}")]
    Consistency(String),

    /// A derived parameter degenerated out of its usable range.
    #[error("degenerate range: {0}")]
    Degenerate(String),

    /// An evaluation point lies outside the domain of validity.
    #[error("domain: {0}")]
    Domain(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
