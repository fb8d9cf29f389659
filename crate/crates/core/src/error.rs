use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid shape {dims:?}: {reason}")]
    InvalidShape { dims: Vec<usize>, reason: &'static str },

    #[error("shape mismatch: expected {expected:?}, got {actual:?}")]
    ShapeMismatch {
        expected: Vec<usize>,
        actual: Vec<usize>,
    },

    #[error("zero amplitude at index {index}")]
    ZeroAmplitude { index: usize },

    #[error("degenerate sample at index {index}: amplitude stayed below the floor after {attempts} draws")]
    DegenerateSample { index: usize, attempts: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("non-finite loss at iteration {iteration}")]
    Divergence { iteration: usize },

    #[error("unknown curve field `{0}`")]
    UnknownField(String),

    #[error("trajectory is empty")]
    EmptyTrajectory,

    #[error("trajectory snapshots are not consecutive (log stride {stride})")]
    NonConsecutive { stride: usize },

    #[error("checker does not apply to {0} trajectories")]
    WrongAlgorithm(&'static str),

    #[error("target is not feasible: {0}")]
    NotFeasible(String),

    #[error("file not found: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("malformed {format} file: {reason}")]
    Parse { format: &'static str, reason: String },

    #[error("unsupported bit depth: {0}")]
    UnsupportedDepth(String),

    #[error("bad magic bytes {found:?}")]
    BadMagic { found: [u8; 4] },

    #[error("header declares {declared} values but payload holds {actual}")]
    DimensionMismatch { declared: usize, actual: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
