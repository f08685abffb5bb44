use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A record could not be decoded. `line` is 1-based.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A record decoded but violates a domain invariant.
    #[error("{}{message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Validation {
        line: Option<usize>,
        message: String,
    },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("value out of range: {0}")]
    Range(String),

    #[error("duplicate record: {0}")]
    Duplicate(String),

    #[error("degenerate geometry: {0}")]
    Geometry(String),

    #[error("ordering violation: {0}")]
    Ordering(String),

    #[error("session contains no frames")]
    EmptySession,

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("coverage: {0}")]
    Coverage(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("unknown format `{0}`")]
    UnknownFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validation(line: Option<usize>, message: impl Into<String>) -> Self {
        Error::Validation {
            line,
            message: message.into(),
        }
    }
}
