use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    NotFound(PathBuf),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unsupported image format: {}: {reason}", path.display())]
    UnsupportedFormat { path: PathBuf, reason: String },

    #[error("corrupt image: {}: {reason}", path.display())]
    CorruptImage { path: PathBuf, reason: String },

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("image {width}x{height} too small: need both sides > {min}")]
    ImageTooSmall { width: usize, height: usize, min: usize },

    #[error("pixel ({col}, {row}) is closer than {margin} to the image border")]
    OutOfBounds { col: usize, row: usize, margin: usize },

    #[error("code {code} does not fit a {bins}-bin histogram")]
    CodeOutOfRange { code: u32, bins: usize },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error("unknown query id {0}")]
    UnknownQuery(usize),

    #[error("index file error: {0}")]
    IndexFormat(String),

    #[error("{0}")]
    Metric(String),
}

/// Coarse error category, used for the CLI's machine-readable error line and
/// the FFI status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    NotFound,
    Io,
    Format,
    Params,
    Bounds,
    Dataset,
    Index,
    Metric,
}

impl ErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::NotFound => "not-found",
            ErrorKind::Io => "io",
            ErrorKind::Format => "format",
            ErrorKind::Params => "params",
            ErrorKind::Bounds => "bounds",
            ErrorKind::Dataset => "dataset",
            ErrorKind::Index => "index",
            ErrorKind::Metric => "metric",
        }
    }
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::NotFound(_) => ErrorKind::NotFound,
            Error::Io { .. } => ErrorKind::Io,
            Error::UnsupportedFormat { .. } | Error::CorruptImage { .. } | Error::InvalidImage(_) => {
                ErrorKind::Format
            }
            Error::InvalidParams(_) | Error::ImageTooSmall { .. } => ErrorKind::Params,
            Error::OutOfBounds { .. } | Error::CodeOutOfRange { .. } | Error::LengthMismatch(..) => {
                ErrorKind::Bounds
            }
            Error::Dataset(_) => ErrorKind::Dataset,
            Error::UnknownQuery(_) | Error::IndexFormat(_) => ErrorKind::Index,
            Error::Metric(_) => ErrorKind::Metric,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::NotFound(path)
        } else {
            Error::Io { path, source }
        }
    }
}
