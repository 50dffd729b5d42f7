use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid exponent {0}: exponents must lie in [1, inf]")]
    InvalidExponent(String),

    #[error("inadmissible exponents (a, b) = ({a}, {b}): violates 1/a + 1/b ≤ 3/2")]
    Inadmissible { a: String, b: String },

    /// An exact enumeration would exceed its configured cap.
    #[error("capacity exceeded for {what}: requires {required}, cap is {cap}")]
    Capacity {
        what: &'static str,
        required: u128,
        cap: u128,
    },

    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    #[error("invalid shape: {0}")]
    Shape(String),

    #[error("ratio undefined: {0}")]
    UndefinedRatio(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error in `{field}`: {message}")]
    Parse { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            message: message.into(),
        }
    }
}
