use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown builtin poset `{0}` (expected chain:p, vee:s, wedge:s or diamond:k)")]
    UnknownBuiltin(String),
    #[error("parameter {value} for `{name}` is outside {min}..={max}")]
    ParameterOutOfRange { name: &'static str, value: i64, min: i64, max: i64 },
    #[error("poset input line {line}: {message}")]
    PosetParse { line: usize, message: String },
    #[error("cover relations contain a cycle through `{0}`")]
    Cycle(String),
    #[error("{what} has size {size}, above the limit of {limit}")]
    SizeLimit { what: &'static str, size: usize, limit: usize },
    #[error("grid shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("operation requires a cubic grid [k]^d, got {0}")]
    NotCubic(String),
    #[error("poset is not two-dimensional")]
    NotTwoDimensional,
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("family is not a pi-block for the given structure")]
    NotPiBlock,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
