//! Compact wire format: a fixed header followed by bit-packed
//! `(node id, count)` tuples.
//!
//! Layout (bit-exact):
//!   - magic byte `0x51`, format version `0x01`
//!   - one byte `log2(sigma)`
//!   - `n` as an unsigned 64-bit big-endian integer
//!   - tuple count as an unsigned 32-bit big-endian integer
//!   - tuples in ascending node-id order, each packed as
//!     `ceil(log2(2*sigma))` id bits then `ceil(log2(n + 1))` count bits,
//!     most-significant bit first, zero-padded to a byte boundary at the
//!     end of the payload.
//!
//! The compression factor `k` does not travel on the wire (all peers share
//! it a priori), so the decoder takes it as an argument.

use alloc::vec::Vec;

use crate::config::DigestConfig;
use crate::digest::QDigest;
use crate::error::{DecodeError, Error};

pub const MAGIC: u8 = 0x51;
pub const VERSION: u8 = 0x01;

const HEADER_LEN: usize = 15;

impl QDigest {
    /// Serialize to the canonical wire format.
    pub fn encode(&self) -> Vec<u8> {
        let sigma = self.config().sigma();
        let n = self.total_count();
        let id_bits = sigma.ilog2() + 1;
        let count_bits = bit_length(n);

        assert!(
            self.bucket_count() <= u32::MAX as usize,
            "digest exceeds the wire format's tuple-count field"
        );
        let tuple_count = self.bucket_count() as u32;
        let payload_bits = tuple_count as usize * (id_bits + count_bits) as usize;
        let mut out = Vec::with_capacity(HEADER_LEN + payload_bits.div_ceil(8));

        out.push(MAGIC);
        out.push(VERSION);
        out.push(sigma.ilog2() as u8);
        out.extend_from_slice(&n.to_be_bytes());
        out.extend_from_slice(&tuple_count.to_be_bytes());

        let mut writer = BitWriter::new(&mut out);
        for (id, count) in self.buckets() {
            writer.push(id.0, id_bits);
            writer.push(count, count_bits);
        }
        writer.finish();
        out
    }

    /// Parse the canonical wire format back into a digest.
    ///
    /// `k` is the compression factor the digest was built with; it is part
    /// of the shared configuration rather than the message.
    pub fn decode(bytes: &[u8], k: u64) -> Result<QDigest, Error> {
        if bytes.len() < HEADER_LEN {
            return Err(DecodeError::Truncated {
                offset: bytes.len(),
                needed: HEADER_LEN - bytes.len(),
            }
            .into());
        }
        if bytes[0] != MAGIC {
            return Err(DecodeError::BadMagic { found: bytes[0] }.into());
        }
        if bytes[1] != VERSION {
            return Err(DecodeError::UnsupportedVersion { found: bytes[1] }.into());
        }
        let log2_sigma = bytes[2];
        if log2_sigma == 0 || log2_sigma > 62 {
            return Err(DecodeError::BadSigma { log2_sigma }.into());
        }
        let n = u64::from_be_bytes(bytes[3..11].try_into().unwrap());
        let tuple_count = u32::from_be_bytes(bytes[11..15].try_into().unwrap()) as usize;

        let sigma = 1u64 << log2_sigma;
        let id_bits = log2_sigma as u32 + 1;
        let count_bits = bit_length(n);
        let payload_len = (tuple_count * (id_bits + count_bits) as usize).div_ceil(8);
        let actual = bytes.len() - HEADER_LEN;
        if actual < payload_len {
            return Err(DecodeError::Truncated {
                offset: bytes.len(),
                needed: payload_len - actual,
            }
            .into());
        }
        if actual > payload_len {
            return Err(DecodeError::TrailingBytes {
                offset: HEADER_LEN + payload_len,
            }
            .into());
        }

        let mut reader = BitReader::new(&bytes[HEADER_LEN..]);
        let mut tuples: Vec<(u64, u64)> = Vec::with_capacity(tuple_count);
        let mut prev_id = 0u64;
        for index in 0..tuple_count {
            let id = reader.pull(id_bits);
            let count = reader.pull(count_bits);
            if id == 0 || id > 2 * sigma - 1 {
                return Err(DecodeError::IdOutOfRange { index, id }.into());
            }
            if id <= prev_id {
                return Err(DecodeError::NonCanonicalOrder { index, id }.into());
            }
            if count == 0 {
                return Err(DecodeError::ZeroCount { index }.into());
            }
            prev_id = id;
            tuples.push((id, count));
        }
        if !reader.padding_is_zero() {
            return Err(DecodeError::NonZeroPadding.into());
        }

        let config = DigestConfig::new(sigma, k)?;
        let digest = QDigest::from_buckets(config, tuples).map_err(|e| match e {
            Error::CountOverflow => Error::Decode(DecodeError::CountSumMismatch {
                sum: u64::MAX,
                expected: n,
            }),
            other => other,
        })?;
        if digest.total_count() != n {
            return Err(DecodeError::CountSumMismatch {
                sum: digest.total_count(),
                expected: n,
            }
            .into());
        }
        Ok(digest)
    }
}

/// Number of bits needed to represent `n` (0 for n = 0); this equals
/// `ceil(log2(n + 1))`, so a count of `n` itself is representable.
#[inline]
fn bit_length(n: u64) -> u32 {
    64 - n.leading_zeros()
}

struct BitWriter<'a> {
    out: &'a mut Vec<u8>,
    acc: u64,
    filled: u32,
}

impl<'a> BitWriter<'a> {
    fn new(out: &'a mut Vec<u8>) -> Self {
        BitWriter {
            out,
            acc: 0,
            filled: 0,
        }
    }

    fn push(&mut self, value: u64, bits: u32) {
        debug_assert!(bits <= 64);
        debug_assert!(bits == 64 || value < (1u64 << bits));
        for shift in (0..bits).rev() {
            self.acc = (self.acc << 1) | ((value >> shift) & 1);
            self.filled += 1;
            if self.filled == 8 {
                self.out.push(self.acc as u8);
                self.acc = 0;
                self.filled = 0;
            }
        }
    }

    fn finish(self) {
        if self.filled > 0 {
            self.out.push((self.acc << (8 - self.filled)) as u8);
        }
    }
}

struct BitReader<'a> {
    bytes: &'a [u8],
    bit_pos: usize,
}

impl<'a> BitReader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        BitReader { bytes, bit_pos: 0 }
    }

    /// Read `bits` most-significant-first; callers stay within the slice.
    fn pull(&mut self, bits: u32) -> u64 {
        let mut value = 0u64;
        for _ in 0..bits {
            let byte = self.bytes[self.bit_pos / 8];
            let bit = (byte >> (7 - (self.bit_pos % 8))) & 1;
            value = (value << 1) | bit as u64;
            self.bit_pos += 1;
        }
        value
    }

    fn padding_is_zero(&self) -> bool {
        let mut pos = self.bit_pos;
        while pos < self.bytes.len() * 8 {
            let byte = self.bytes[pos / 8];
            if (byte >> (7 - (pos % 8))) & 1 != 0 {
                return false;
            }
            pos += 1;
        }
        true
    }
}
