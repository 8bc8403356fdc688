use thiserror::Error;

/// Errors produced by the geometry, integration and I/O layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("k = {k} out of range for ambient dimension {n}")]
    KOutOfRange { k: usize, n: usize },

    #[error("invalid grid complex: {0}")]
    InvalidComplex(String),

    #[error("invalid cell: {0}")]
    InvalidCell(String),

    #[error("invalid simplicial set: {0}")]
    InvalidSimplicialSet(String),

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("invalid coefficient profile: {0}")]
    InvalidProfile(String),

    #[error("unsupported request: {0}")]
    Unsupported(String),

    /// A sampled flat met a cell boundary within the tie tolerance.
    #[error("non-generic flat (feasibility margin {margin:e} within tie tolerance)")]
    DegenerateFlat { margin: f64 },

    #[error("too many degenerate draws for sample {index}")]
    ResampleExhausted { index: u64 },

    #[error("calibration failure: {0}")]
    Calibration(String),

    #[error("matrix is not orthogonal (deviation {0:e})")]
    NonOrthogonal(f64),

    #[error("invalid samples: {0}")]
    InvalidSamples(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Broad category used for CLI exit codes and FFI status codes.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse(_) | Error::Io(_) => ErrorKind::Parse,
            Error::DegenerateFlat { .. }
            | Error::ResampleExhausted { .. }
            | Error::Calibration(_) => ErrorKind::Numerical,
            _ => ErrorKind::Validation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Validation,
    Numerical,
}

pub type Result<T> = std::result::Result<T, Error>;
