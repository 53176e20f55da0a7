use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed message {source_id}: {reason}")]
    MalformedMessage { source_id: String, reason: String },

    #[error("invalid feature subset: {0}")]
    InvalidSubset(String),

    #[error("class `{0}` has no training samples")]
    EmptyClass(String),

    #[error("dimension mismatch: expected {expected} features, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("training loss became non-finite at epoch {epoch}; learning rate too large?")]
    NonFiniteLoss { epoch: usize },

    #[error("length mismatch: {predictions} predictions vs {truth} truth labels")]
    LengthMismatch { predictions: usize, truth: usize },

    #[error("confusion matrix is empty")]
    EmptyMatrix,

    #[error("too few samples: {0}")]
    TooFewSamples(String),

    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("no messages found under {}", .0.display())]
    NoMessagesFound(PathBuf),

    #[error("unsupported model format version {found} (supported: {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },

    #[error("corrupt model file: {0}")]
    CorruptModel(String),

    #[error("feature mismatch: model uses [{model}] but input provides [{input}]")]
    FeatureMismatch { model: String, input: String },

    #[error("labels required: {0}")]
    LabelsRequired(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// The innermost error, looking through fold annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::Fold { source, .. } => source.root(),
            other => other,
        }
    }
}
