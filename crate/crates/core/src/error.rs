use thiserror::Error;

/// Failures raised by the analysis library.
///
/// Variants are grouped by [`ErrorKind`] so that front ends can map them onto
/// exit statuses without matching every case.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate sequence id {seq_id} (first at line {first_line}, again at line {second_line})")]
    DuplicateSeqId {
        seq_id: String,
        first_line: usize,
        second_line: usize,
    },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("empty corpus: {0}")]
    EmptyCorpus(String),

    #[error("name {name:?} not found in any document{}", near_miss_suffix(.near_misses))]
    NameNotFound {
        name: String,
        near_misses: Vec<String>,
    },

    #[error("word {0:?} is not in the vocabulary")]
    UnknownWord(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid focus: {0}")]
    InvalidFocus(String),

    #[error("degenerate focus {focus}: {reason}")]
    DegenerateFocus { focus: String, reason: String },

    #[error("{0:?} is not an active column; add it to the active list of the focus")]
    NotActive(String),

    #[error("column {0:?} has zero total")]
    ZeroColumn(String),

    #[error("axis {axis} out of range 1..={rank}")]
    AxisOutOfRange { axis: usize, rank: usize },

    #[error("no factor space: the model has rank 0")]
    NoFactorSpace,

    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },

    #[error("non-finite or negative value at index {0}")]
    InvalidValue(usize),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("unsupported format {given:?}; supported: {supported}")]
    UnsupportedFormat { given: String, supported: String },

    #[error("malformed {what}: {message}")]
    Malformed { what: &'static str, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn near_miss_suffix(near: &[String]) -> String {
    if near.is_empty() {
        String::new()
    } else {
        format!("; did you mean: {}", near.join(", "))
    }
}

/// Coarse classification of an [`Error`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad or unreadable input data.
    Input,
    /// A numerical routine could not produce a result.
    Numeric,
    /// A caller broke an operation's precondition.
    Contract,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. }
            | Error::DuplicateSeqId { .. }
            | Error::Config { .. }
            | Error::EmptyCorpus(_)
            | Error::Malformed { .. }
            | Error::Json(_)
            | Error::Csv(_)
            | Error::Io(_) => ErrorKind::Input,
            Error::Numeric(_) | Error::NoFactorSpace => ErrorKind::Numeric,
            Error::NameNotFound { .. }
            | Error::UnknownWord(_)
            | Error::InvalidArgument(_)
            | Error::InvalidFocus(_)
            | Error::DegenerateFocus { .. }
            | Error::NotActive(_)
            | Error::ZeroColumn(_)
            | Error::AxisOutOfRange { .. }
            | Error::TooFewValues { .. }
            | Error::InvalidValue(_)
            | Error::UnsupportedFormat { .. } => ErrorKind::Contract,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
