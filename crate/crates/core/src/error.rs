use std::path::PathBuf;

use crate::measures::Measure;

/// Errors produced by the realism-scoring pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unsupported image format")]
    UnsupportedFormat,
    #[error("corrupt image file: {0}")]
    CorruptFile(String),
    #[error("image too small: {width}x{height} (minimum side is {min})")]
    ImageTooSmall { width: usize, height: usize, min: usize },
    #[error("invalid image dimensions: {0}")]
    InvalidDimensions(String),
    #[error("pixel value out of range at index {index}: {value}")]
    ValueOutOfRange { index: usize, value: f64 },
    #[error("gaussian sigma must be positive and finite, got {0}")]
    InvalidSigma(f64),
    #[error("quantization levels must be in [2, 256], got {0}")]
    InvalidLevels(usize),
    #[error("no valid pixel pairs for offset ({dx}, {dy})")]
    NoValidPairs { dx: isize, dy: isize },
    #[error("at least {needed} samples required, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("measure column {0} has zero variance")]
    DegenerateColumn(Measure),
    #[error("calibration corpus is empty: {0}")]
    EmptyCorpus(&'static str),
    #[error("real-corpus mean of {0} is not positive")]
    ZeroRealMean(Measure),
    #[error("fake-corpus calibrated mean of {0} is not positive")]
    ZeroFakeMean(Measure),
    #[error("radius {index} is negative: {value}")]
    NegativeRadius { index: usize, value: f64 },
    #[error("radius {index} is not finite: {value}")]
    NonFiniteRadius { index: usize, value: f64 },
    #[error("threshold must be positive and finite, got {0}")]
    InvalidThreshold(f64),
    #[error("invalid ordering: {0}")]
    InvalidOrdering(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("profile file not found: {}", .0.display())]
    MissingReferenceFile(PathBuf),
    #[error("no images found under {}", .0.display())]
    NoImagesFound(PathBuf),
    #[error("record {0} carries no ground-truth label")]
    UnlabeledRecord(String),
    #[error("invalid report: {0}")]
    InvalidReport(String),
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
