use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value violates an operation's preconditions.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A configuration is internally inconsistent or refers to unknown names.
    #[error("configuration error: {0}")]
    Config(String),

    /// A numerical routine failed beyond recoverable conditioning fixes.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// File I/O failed; carries the offending path.
    #[error("i/o error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
