use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, VqpmError>;

#[derive(Debug, Error)]
pub enum VqpmError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    /// Every coefficient is zero, so the scale factor is undefined.
    #[error("degenerate problem: all coefficients are zero")]
    DegenerateProblem,

    #[error("capacity exceeded: n = {n} is above the limit of {limit}")]
    Capacity { n: usize, limit: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl VqpmError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        VqpmError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<()> {
        if expected == actual {
            Ok(())
        } else {
            Err(VqpmError::Dimension { expected, actual })
        }
    }
}
