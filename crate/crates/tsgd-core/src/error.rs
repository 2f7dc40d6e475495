//! Error type shared across the crate.

use std::path::PathBuf;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors emitted by the library.
///
/// The CLI maps these onto exit codes: configuration problems exit 1,
/// data problems exit 2, I/O problems exit 3. Divergence of a run is
/// deliberately *not* an error; it is flagged in the metrics rows instead.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Operands of mismatched shape (vector lengths, horizon grids, ...).
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    /// A parameter outside its mathematical domain (quantile, learning rate, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A computation produced a non-finite value where one is not allowed.
    #[error("non-finite value: {0}")]
    Numeric(String),

    /// An operation was called on state that cannot support it (e.g. empty buffer).
    #[error("state error: {0}")]
    State(String),

    /// A buffer or trajectory push that is not the successor of the last entry.
    #[error("sequencing error: expected step {expected}, got {got}")]
    Sequencing { expected: u64, got: u64 },

    /// Malformed input file content.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Structurally valid input that violates series integrity (gaps, duplicates, empty).
    #[error("integrity error: {0}")]
    Integrity(String),

    /// Invalid experiment configuration.
    #[error("config error: {0}")]
    Config(String),

    /// The data source cannot supply what the experiment needs.
    #[error("data error: {0}")]
    Data(String),

    /// Filesystem failure, tagged with the offending path.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
