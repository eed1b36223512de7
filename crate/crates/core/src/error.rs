//! Error type shared across the solver core.

use alloc::string::String;

/// Everything that can go wrong while building or running a simulation.
///
/// Divergence of a *run* is not an `Error`: the driver reports it through
/// [`crate::sim::Termination`] so that partial results stay available.
/// `Error` covers invalid configuration and internal misuse.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An input value violates a documented precondition. The message names
    /// the offending quantity and the allowed range.
    Config(String),
    /// A primed sum was requested over a span that has no dedicated
    /// coefficient row (interior span of 6 or fewer intervals).
    UnsupportedSpan { lo: usize, hi: usize },
    /// A nodal sequence does not match the grid size.
    LengthMismatch { expected: usize, got: usize },
    /// A rate function was evaluated outside its domain (negative size).
    Domain { what: &'static str, value: f64 },
    /// A right-hand-side evaluation produced non-finite values; reported by
    /// the driver as divergence.
    NonFinite,
}

impl core::fmt::Display for Error {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::UnsupportedSpan { lo, hi } => write!(
                f,
                "primed sum over ({lo},{hi}) is unsupported: no coefficient row \
                 exists for interior spans of 6 or fewer intervals"
            ),
            Error::LengthMismatch { expected, got } => {
                write!(f, "sequence length {got} does not match grid size {expected}")
            }
            Error::Domain { what, value } => {
                write!(f, "{what} must be nonnegative, got {value}")
            }
            Error::NonFinite => write!(f, "state contains non-finite values"),
        }
    }
}

impl core::error::Error for Error {}

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
