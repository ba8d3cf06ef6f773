//! Error type shared across the crate.

use std::fmt;

/// Errors surfaced by sieve construction, claim audits and the CLI.
#[derive(Debug)]
pub enum Error {
    /// An argument violates a documented precondition (zero modulus,
    /// even `q`, `p <= 3` for digit profiles, ...).
    Domain(String),
    /// A configured budget (memory, operation count) refuses the request.
    /// Carries the budget name so callers can report which knob to raise.
    Resource { what: String, budget: u64, needed: u64 },
    /// The requested value cannot be produced with the effort allowed,
    /// e.g. `sigma_single` on an integer the factorizer could not finish.
    Unavailable(String),
    /// An internal identity that must hold for every input failed.
    /// Reaching this means the build is wrong, not the input.
    Inconsistency(String),
    /// Fixed-width arithmetic would overflow; rerun within the documented
    /// range or with a wider engine.
    Overflow(String),
    Io(std::io::Error),
    /// Malformed command line.
    Usage(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Resource { what, budget, needed } => {
                write!(f, "resource error: {what} needs {needed} but the budget is {budget}")
            }
            Error::Unavailable(msg) => write!(f, "unavailable: {msg}"),
            Error::Inconsistency(msg) => write!(f, "internal consistency failure: {msg}"),
            Error::Overflow(msg) => write!(f, "arithmetic overflow: {msg}"),
            Error::Io(e) => write!(f, "i/o error: {e}"),
            Error::Usage(msg) => write!(f, "usage error: {msg}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
