use thiserror::Error;

/// Errors raised by the estimators and the algebra underneath them.
#[derive(Debug, Error)]
pub enum Error {
    #[error("kernel integral {value} lies outside (0, 1)")]
    OutOfRange { value: f64 },

    #[error("operation requires response values but the sample has none")]
    MissingResponses,

    #[error("missing model bound `{0}`")]
    MissingBound(&'static str),

    #[error("simplex budget of {budget} exceeded")]
    CapacityExceeded { budget: usize },

    #[error("unsupported ambient dimension {dim} (supported: {supported})")]
    UnsupportedDimension { dim: usize, supported: &'static str },

    #[error("first complex is not a prefix subcomplex of the second in dimension {dim}")]
    NotASubcomplex { dim: usize },

    #[error("kernel bases require a field of characteristic zero")]
    WrongField,

    #[error("no level in the scan reached the target Betti number")]
    NoStableLevel,

    #[error("unsupported output format `{0}`")]
    UnsupportedFormat(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
