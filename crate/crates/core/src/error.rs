use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read image {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to decode image {path}: {message}")]
    Decode { path: PathBuf, message: String },

    #[error("unsupported image format for {path}: {message}")]
    UnsupportedFormat { path: PathBuf, message: String },

    #[error("image {path} has zero width or height")]
    EmptyImage { path: PathBuf },

    #[error("failed to write image {path}: {message}")]
    Write { path: PathBuf, message: String },

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("unknown filter `{0}`")]
    UnknownFilter(String),

    #[error("duplicate filter id `{0}` in registry")]
    DuplicateFilter(String),

    #[error("malformed filter registry: {0}")]
    Registry(String),

    #[error("parameter {value} for `{filter}` is outside [0, {max}]")]
    ParameterOutOfRange { filter: String, value: f64, max: f64 },

    #[error("target smoothing level {0} is outside [0, 1]")]
    TargetOutOfRange(f64),

    #[error("linear solver did not converge after {iterations} iterations (residual {residual:e})")]
    SolverDiverged { iterations: usize, residual: f64 },

    #[error("failed to spawn external filter {path}: {source}")]
    Spawn {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("external filter `{filter}` failed: {message}\n{stderr}")]
    External {
        filter: String,
        message: String,
        stderr: String,
    },

    #[error("global contrast factor of the input is zero; contrast ratio is undefined")]
    UndefinedContrast,

    #[error("image of {width}x{height} is too small: {reason}")]
    TooSmall {
        width: usize,
        height: usize,
        reason: &'static str,
    },

    #[error("polynomial fit is degenerate: {0}")]
    DegenerateFit(String),

    #[error("empty corpus: {0}")]
    EmptyCorpus(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
