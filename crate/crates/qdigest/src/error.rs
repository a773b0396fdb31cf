//! Error types for digest construction, queries and the wire codec.

use core::fmt;

/// Errors returned by digest construction and query operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A reading or query value lies outside `[1, max_value]`.
    ValueOutOfRange { value: u64, max_value: u64 },
    /// A node id lies outside `[1, 2*sigma - 1]`.
    NodeIdOutOfRange { id: u64, sigma: u64 },
    /// `sigma` is not a power of two (internal tree arithmetic requires it).
    SigmaNotPowerOfTwo { sigma: u64 },
    /// The declared maximum value is zero or too large to index.
    InvalidMaxValue { max_value: u64 },
    /// The compression factor must be at least one.
    InvalidCompressionFactor { k: u64 },
    /// A bucket was supplied with a zero count.
    ZeroBucketCount { id: u64 },
    /// The query requires a non-empty digest.
    EmptyDigest,
    /// Quantile fraction outside the open interval (0, 1).
    QuantileOutOfRange { q: f64 },
    /// Range query with `low > high`.
    InvalidRange { low: u64, high: u64 },
    /// Attempted to merge digests built with different configurations.
    ConfigMismatch,
    /// Counts overflowed 64 bits; merging such digests is a hard error.
    CountOverflow,
    /// Wire-format decoding failed.
    Decode(DecodeError),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ValueOutOfRange { value, max_value } => {
                write!(f, "value {value} outside [1, {max_value}]")
            }
            Error::NodeIdOutOfRange { id, sigma } => {
                write!(f, "node id {id} outside [1, {}]", 2 * sigma - 1)
            }
            Error::SigmaNotPowerOfTwo { sigma } => {
                write!(f, "sigma {sigma} is not a power of two")
            }
            Error::InvalidMaxValue { max_value } => {
                write!(f, "maximum value {max_value} is not representable")
            }
            Error::InvalidCompressionFactor { k } => {
                write!(f, "compression factor {k} must be >= 1")
            }
            Error::ZeroBucketCount { id } => {
                write!(f, "bucket {id} has a zero count")
            }
            Error::EmptyDigest => write!(f, "operation requires a non-empty digest"),
            Error::QuantileOutOfRange { q } => {
                write!(f, "quantile fraction {q} outside (0, 1)")
            }
            Error::InvalidRange { low, high } => {
                write!(f, "range [{low}, {high}] has low > high")
            }
            Error::ConfigMismatch => write!(f, "digests have different configurations"),
            Error::CountOverflow => write!(f, "count overflowed 64 bits"),
            Error::Decode(e) => write!(f, "decode error: {e}"),
        }
    }
}

impl core::error::Error for Error {}

impl From<DecodeError> for Error {
    fn from(e: DecodeError) -> Self {
        Error::Decode(e)
    }
}

/// Errors raised while decoding the wire format, identifying the offending field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeError {
    /// Input ended early; `offset` is where the missing bytes were expected.
    Truncated { offset: usize, needed: usize },
    /// Input continues past the end of the payload.
    TrailingBytes { offset: usize },
    /// First byte is not the format magic.
    BadMagic { found: u8 },
    /// Unsupported format version byte.
    UnsupportedVersion { found: u8 },
    /// The log2(sigma) header byte is zero or too large.
    BadSigma { log2_sigma: u8 },
    /// Tuple at `index` carries a node id outside `[1, 2*sigma - 1]`.
    IdOutOfRange { index: usize, id: u64 },
    /// Tuple ids must be strictly ascending (also rejects duplicates).
    NonCanonicalOrder { index: usize, id: u64 },
    /// Tuple at `index` carries a zero count.
    ZeroCount { index: usize },
    /// Bucket counts do not sum to the header's `n`.
    CountSumMismatch { sum: u64, expected: u64 },
    /// Padding bits after the last tuple must be zero.
    NonZeroPadding,
}

impl fmt::Display for DecodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecodeError::Truncated { offset, needed } => {
                write!(
                    f,
                    "truncated input: need {needed} more byte(s) at offset {offset}"
                )
            }
            DecodeError::TrailingBytes { offset } => {
                write!(f, "unexpected trailing bytes at offset {offset}")
            }
            DecodeError::BadMagic { found } => {
                write!(f, "bad magic byte {found:#04x}, expected 0x51")
            }
            DecodeError::UnsupportedVersion { found } => {
                write!(f, "unsupported format version {found}")
            }
            DecodeError::BadSigma { log2_sigma } => {
                write!(f, "log2(sigma) byte {log2_sigma} outside [1, 62]")
            }
            DecodeError::IdOutOfRange { index, id } => {
                write!(f, "tuple {index}: node id {id} out of range")
            }
            DecodeError::NonCanonicalOrder { index, id } => {
                write!(f, "tuple {index}: id {id} not strictly ascending")
            }
            DecodeError::ZeroCount { index } => {
                write!(f, "tuple {index}: zero count")
            }
            DecodeError::CountSumMismatch { sum, expected } => {
                write!(
                    f,
                    "bucket counts sum to {sum}, header claims n = {expected}"
                )
            }
            DecodeError::NonZeroPadding => write!(f, "non-zero padding bits after payload"),
        }
    }
}

impl core::error::Error for DecodeError {}
