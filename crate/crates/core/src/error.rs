//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors produced by geometry construction, solvers, and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value violates a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An index (angle, grid node, lattice site) is out of range.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// Shapes or geometries of two inputs do not agree.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// An iterative scheme diverged or produced non-finite values.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A text file did not parse; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
