use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("elements belong to different number fields")]
    FieldMismatch,

    #[error("element {0} is not invertible in this field")]
    NotInvertible(String),

    #[error("measure check failed on row {row} ({type_name}): {detail}")]
    MeasureViolation {
        row: usize,
        type_name: String,
        detail: String,
    },

    #[error("rule validation failed: {0}")]
    Validation(String),

    #[error("parse error at line {line}, column {column} ({path}): {message}")]
    Parse {
        line: usize,
        column: usize,
        path: String,
        message: String,
    },

    #[error("expansion would produce {count} tiles, exceeding the cap of {cap}")]
    CapExceeded { count: String, cap: u64 },

    #[error("unknown rule '{name}'; available: {available}")]
    UnknownRule { name: String, available: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
