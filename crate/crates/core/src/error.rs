use std::path::PathBuf;

/// Errors produced by the analyzer.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("project root does not exist: {0}")]
    MissingProjectRoot(PathBuf),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("unsupported facts archive version {found} (reader supports {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },

    #[error("facts archive integrity error: {0}")]
    Integrity(String),

    #[error("duplicate project id `{0}`")]
    DuplicateProject(String),

    #[error("unknown metric `{0}`")]
    UnknownMetric(String),

    #[error("series length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("insufficient data: {usable} usable points, at least {required} required")]
    InsufficientData { usable: usize, required: usize },

    #[error("degenerate predictor: transformed x has zero variance")]
    DegeneratePredictor,

    #[error("correlation undefined: zero variance")]
    UndefinedCorrelation,

    #[error("normalization undefined: y_max equals y_min")]
    UndefinedNormalization,

    #[error("empty range [{low}, {high})")]
    EmptyRange { low: f64, high: f64 },

    #[error("bin `{0}` has no usable projects")]
    EmptyBin(String),

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("pipeline stage `{stage}` failed: {source}")]
    Pipeline {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
