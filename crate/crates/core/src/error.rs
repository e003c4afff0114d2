use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("header mismatch: expected [{expected}], found [{found}]")]
    HeaderMismatch { expected: String, found: String },

    #[error("empty table")]
    EmptyTable,

    #[error("parse error at row {row}, column \"{column}\": {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("missing value at row {row}, column \"{column}\"")]
    MissingValue { row: usize, column: String },

    #[error("value {value} of column \"{column}\" is outside its bounds")]
    OutOfBounds { column: String, value: String },

    #[error("invalid bounds for column \"{column}\": {message}")]
    InvalidBounds { column: String, message: String },

    #[error("invalid schema: {0}")]
    InvalidSchema(String),

    #[error("unknown column \"{0}\"")]
    UnknownColumn(String),

    #[error("epsilon must be a finite positive number, got {0}")]
    InvalidEpsilon(f64),

    #[error("invalid budget split: {0}")]
    InvalidSplit(String),

    #[error("exponential mechanism needs at least one candidate")]
    EmptyCandidates,

    #[error("invalid mechanism argument: {0}")]
    InvalidMechanism(String),

    #[error("dependency graph has a cycle through columns [{}]", .0.join(", "))]
    Cycle(Vec<String>),

    #[error("invalid dependency: {0}")]
    InvalidDependency(String),

    #[error("invalid model spec: {0}")]
    InvalidSpec(String),

    #[error("method {method} does not support {ty} column \"{column}\"")]
    MethodTypeMismatch { column: String, method: String, ty: String },

    #[error("method \"{0}\" is not available in this version")]
    UnsupportedMethod(String),

    #[error(
        "joint histogram for column \"{column}\" needs {cells} cells (cap {cap}); use fewer parents or fewer bins"
    )]
    HistogramTooLarge { column: String, cells: u128, cap: u64 },

    #[error("column \"{column}\" has {rows} rows; private regression needs at least {min}")]
    TooFewRows { column: String, rows: usize, min: usize },

    #[error("unsupported version {found} (this build reads version {supported})")]
    UnsupportedVersion { found: u64, supported: u64 },

    #[error("model checksum mismatch: file is corrupt")]
    Checksum,

    #[error("malformed model file: {0}")]
    MalformedModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for errors caused by user configuration rather than by data or I/O.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidEpsilon(_)
                | Error::InvalidSplit(_)
                | Error::InvalidSpec(_)
                | Error::InvalidSchema(_)
                | Error::UnknownColumn(_)
                | Error::MethodTypeMismatch { .. }
                | Error::UnsupportedMethod(_)
                | Error::InvalidDependency(_)
                | Error::Cycle(_)
                | Error::InvalidArgument(_)
        )
    }
}
