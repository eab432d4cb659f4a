use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid pmf: {0}")]
    InvalidPmf(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("delta {delta} lies outside the covered range [0, {covered})")]
    OutOfCoverage { delta: f64, covered: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("truncated support: {0}")]
    Truncated(String),

    #[error("symbol `{0}` is not in the map domain")]
    UnknownSymbol(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("input `{input}`: {source}")]
    Row {
        input: String,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error{}: {msg}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<u64>, msg: String },

    #[error("example constraint violated: {0}")]
    ExampleConstraint(String),

    #[error("enumeration refused: {required} maps exceed the cap of {cap}")]
    EnumerationRefused { required: f64, cap: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// The innermost error, looking through per-row wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Row { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn parse(line: Option<u64>, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
