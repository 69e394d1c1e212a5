use thiserror::Error;

/// Errors raised by the simulator and post-processing stages.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("pilot at {pilot} cycles/sample overlaps the signal band [{lo}, {hi}]")]
    SpectralOverlap { pilot: f64, lo: f64, hi: f64 },

    #[error("frame sync not found: peak-to-sidelobe ratio {psr:.2} below threshold {threshold:.2}")]
    SyncNotFound { psr: f64, threshold: f64 },

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("unusable channel: {0}")]
    UnusableChannel(String),

    #[error("non-physical covariance: symplectic eigenvalue {0} < 1")]
    NonPhysical(f64),

    #[error("zero-norm block")]
    ZeroNorm,

    #[error("code file: {0}")]
    CodeFormat(String),

    #[error("unknown code `{0}`")]
    UnknownCode(String),

    #[error("config: {0}")]
    Config(String),

    /// Displays the whole chain itself, so it reports no separate source.
    #[error("{stage}: {inner}")]
    Stage { stage: &'static str, inner: Box<Error> },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Tags the error with the pipeline stage it came from.
    pub fn at(self, stage: &'static str) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage { stage, inner: Box::new(e) },
        }
    }

    /// The innermost error, without stage tags.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { inner, .. } => inner.root(),
            e => e,
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
