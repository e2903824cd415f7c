use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown residue or invalid (symbol, modification) pair: {0}")]
    InvalidResidue(String),

    #[error("empty peptide")]
    EmptyPeptide,

    #[error("rejected input: {0}")]
    InvalidInput(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("scorer failed at position {position}: {source}")]
    Scorer {
        position: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("fetch failed: {0} (check the network and retry, or pass a local FASTA path)")]
    Fetch(String),

    #[error("index cache rejected: {0}")]
    CacheFormat(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
