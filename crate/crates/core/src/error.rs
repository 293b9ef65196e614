//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by tensor math, model construction, training and I/O.
#[derive(Error, Debug)]
pub enum CoreError {
    #[error("shape mismatch in {context}: left {left:?} vs right {right:?}")]
    ShapeMismatch {
        context: &'static str,
        left: Vec<usize>,
        right: Vec<usize>,
    },

    #[error("{context}: expected {expected}, got {got}")]
    InvalidArgument {
        context: &'static str,
        expected: String,
        got: String,
    },

    #[error("backward requires a scalar loss, got shape {shape:?}")]
    NonScalarLoss { shape: Vec<usize> },

    #[error("tensor is not part of a graph; nothing to backpropagate")]
    NotInGraph,

    #[error("image extents {h}x{w} must be divisible by {divisor}; pad the input first")]
    Indivisible { h: usize, w: usize, divisor: usize },

    #[error("non-finite gradient in parameter '{name}'")]
    NonFiniteGradient { name: String },

    #[error("dataset is empty: {0}")]
    EmptyDataset(String),

    #[error("incompatible checkpoint '{name}': {reason}")]
    IncompatibleCheckpoint { name: String, reason: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {path}: {reason}")]
    Malformed { path: String, reason: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;

impl CoreError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CoreError::Io {
            path: path.into(),
            source,
        }
    }
}
