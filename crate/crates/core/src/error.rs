use std::path::PathBuf;

use thiserror::Error;

/// Failures inside the tensor engine and the layers built on it.
#[derive(Debug, Error)]
pub enum TensorError {
    #[error("shape mismatch in `{op}`: {lhs:?} vs {rhs:?}")]
    ShapeMismatch {
        op: &'static str,
        lhs: Vec<usize>,
        rhs: Vec<usize>,
    },
    #[error("`{op}` expects {expected}, got shape {got:?}")]
    BadShape {
        op: &'static str,
        expected: String,
        got: Vec<usize>,
    },
    #[error("data length {len} does not match shape {shape:?}")]
    LengthMismatch { shape: Vec<usize>, len: usize },
    #[error("backward needs a scalar loss, got shape {0:?}")]
    NonScalarLoss(Vec<usize>),
    #[error("`{0}` has no derivative; detach its inputs before calling backward")]
    NoDerivative(&'static str),
    #[error("invalid argument to `{op}`: {msg}")]
    BadArg { op: &'static str, msg: String },
}

pub type TensorResult<T> = std::result::Result<T, TensorError>;

/// Crate-wide error type; CLI maps variants onto exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {msg}")]
    Image { path: PathBuf, msg: String },
    #[error("bad config: {0}")]
    Config(String),
    #[error("bad file format: {0}")]
    Format(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
