//! Error type shared by every module in the crate.

use alloc::string::String;
use core::fmt;

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors produced by constructors and algorithms.
///
/// Every variant names the offending input so callers can report failures
/// without re-deriving context.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An input collection that must hold data was empty.
    EmptyInput(&'static str),
    /// A configuration value is outside its documented domain.
    InvalidConfig(String),
    /// A buffer length does not match the dimensions it was paired with.
    LengthMismatch { expected: usize, got: usize },
    /// Two grids that must share dimensions do not.
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    /// The grid parameter `k` exceeds the smaller image dimension.
    GridTooFine {
        k: usize,
        width: usize,
        height: usize,
    },
    /// A numeric input was NaN or infinite where a finite value is required.
    NonFiniteInput(&'static str),
    /// A value is outside the range its container requires.
    OutOfRange(&'static str),
    /// Fewer observations than the algorithm can work with.
    InsufficientData { needed: usize, got: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyInput(what) => write!(f, "{what} must not be empty"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::LengthMismatch { expected, got } => {
                write!(f, "buffer length {got} does not match dimensions ({expected} expected)")
            }
            Error::DimensionMismatch { expected, got } => write!(
                f,
                "dimensions {}x{} do not match expected {}x{}",
                got.0, got.1, expected.0, expected.1
            ),
            Error::GridTooFine { k, width, height } => write!(
                f,
                "grid parameter k={k} exceeds the smaller dimension of a {width}x{height} map"
            ),
            Error::NonFiniteInput(what) => write!(f, "{what} must be finite"),
            Error::OutOfRange(what) => write!(f, "{what} is out of range"),
            Error::InsufficientData { needed, got } => {
                write!(f, "need at least {needed} observations, got {got}")
            }
        }
    }
}

impl core::error::Error for Error {}
