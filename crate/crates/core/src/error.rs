use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Operands disagree on a length or qubit count.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// A parameter is outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// The request would exceed a dense-representation or enumeration cap.
    #[error("resource limit: {0}")]
    Resource(String),
    /// A circuit is malformed (overlapping supports, bad wires, non-unitary gates).
    #[error("structural error: {0}")]
    Structural(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure {
    ($cond:expr, $kind:ident, $($arg:tt)*) => {
        if !$cond {
            return Err($crate::error::Error::$kind(format!($($arg)*)));
        }
    };
}
pub(crate) use ensure;
