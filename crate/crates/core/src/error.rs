use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Malformed or inconsistent input.
    #[error("input error: {0}")]
    Input(String),
    /// A size limit of an exponential-time algorithm was exceeded.
    #[error("capacity error: {what} is {got}, limit is {limit}")]
    Capacity {
        what: &'static str,
        got: usize,
        limit: usize,
    },
    /// A function required to be monotone (or bracketed) was not.
    #[error("domain error: {0}")]
    Domain(String),
    /// Quadrature, tail truncation or root finding failed to converge.
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("unsupported combination: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub(crate) fn capacity(what: &'static str, got: usize, limit: usize) -> Self {
        Error::Capacity { what, got, limit }
    }
}
