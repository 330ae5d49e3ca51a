use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while parsing a BSDS `.seg` file. Every variant carries the
/// 1-based line number where the problem was detected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SegParseError {
    #[error("line {line}: malformed header line")]
    BadHeaderLine { line: usize },
    #[error("line {line}: missing or invalid header field `{key}`")]
    MissingHeader { key: &'static str, line: usize },
    #[error("line {line}: malformed run, expected four integers `label row col_start col_end`")]
    BadRun { line: usize },
    #[error("line {line}: run lies outside the {width}x{height} image")]
    OutOfBounds { line: usize, width: usize, height: usize },
    #[error("line {line}: run overlaps pixel ({row}, {col}) already covered")]
    Overlap { line: usize, row: usize, col: usize },
    #[error("line {line}: {count} pixels not covered by any run, first at ({row}, {col})")]
    Uncovered { line: usize, count: usize, row: usize, col: usize },
}

impl SegParseError {
    pub fn line(&self) -> usize {
        match *self {
            SegParseError::BadHeaderLine { line }
            | SegParseError::MissingHeader { line, .. }
            | SegParseError::BadRun { line }
            | SegParseError::OutOfBounds { line, .. }
            | SegParseError::Overlap { line, .. }
            | SegParseError::Uncovered { line, .. } => line,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("label buffer has {actual} entries, expected {width}x{height}")]
    BadLength { width: usize, height: usize, actual: usize },
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("segmentation group is empty")]
    EmptyGroup,
    #[error("confidence {0} is outside [0, 1]")]
    ConfidenceRange(f64),
    #[error("{0} confidences given for {1} members")]
    ConfidenceCount(usize, usize),
    #[error("threshold {0} is outside (0, 1]")]
    ThresholdRange(f64),
    #[error("vector arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("cannot take the mode of an empty subset")]
    EmptySubset,
    #[error("requested {k} clusters but only {available} distinct vectors exist")]
    TooManyClusters { k: usize, available: usize },
    #[error("cluster count must be at least 1")]
    ZeroClusters,
    #[error("reference set is empty")]
    EmptyReferences,
    #[error(transparent)]
    SegParse(#[from] SegParseError),
    #[error("label map contains background pixels, which the .seg format cannot express")]
    BackgroundInSeg,
    #[error("label {0} does not fit in an 8-bit raster; write a 16-bit raster instead")]
    LabelTooLargeFor8Bit(u32),
    #[error("label {0} does not fit in a 16-bit raster")]
    LabelTooLargeFor16Bit(u32),
    #[error("unsupported raster: {0}")]
    UnsupportedRaster(String),
    #[error("png: {0}")]
    Png(String),
    #[error("{path}: {message}")]
    Sidecar { path: PathBuf, message: String },
    #[error("no segmentation files found in {0}")]
    NoMembers(PathBuf),
    #[error("{path}: {source}")]
    File { path: PathBuf, source: Box<Error> },
    #[error("leave-one-out evaluation needs at least two members, found {0}")]
    LeaveOneOutTooFew(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn at(path: impl Into<PathBuf>, source: Error) -> Self {
        Error::File { path: path.into(), source: Box::new(source) }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
