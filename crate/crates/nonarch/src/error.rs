use thiserror::Error;

/// Errors raised by the library. `Parse` and `Io` map to CLI exit code 2,
/// everything else to exit code 1.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("truncation loss: {0}")]
    Truncation(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unverifiable: {0}")]
    Unverifiable(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$kind(format!($($arg)*)))
    };
}
pub(crate) use bail;
