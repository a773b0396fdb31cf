//! Digest configuration: the value domain bound and the compression factor.

use crate::error::Error;

/// Largest supported power-of-two domain; keeps node ids within `u64`.
const MAX_SIGMA: u64 = 1 << 62;

/// Fixed parameters shared by every digest that is ever merged together.
///
/// `max_value` is the caller-declared upper bound on readings (values live in
/// `[1, max_value]`). Internally the tree is built over `[1, sigma]` where
/// `sigma` is `max_value` rounded up to a power of two, so that node-id
/// arithmetic stays closed; queries still reject values above `max_value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DigestConfig {
    max_value: u64,
    sigma: u64,
    k: u64,
}

impl DigestConfig {
    /// Create a configuration for values in `[1, max_value]` with compression
    /// factor `k`. `max_value` is rounded up to the next power of two (min 2).
    pub fn new(max_value: u64, k: u64) -> Result<Self, Error> {
        if max_value == 0 || max_value > MAX_SIGMA {
            return Err(Error::InvalidMaxValue { max_value });
        }
        if k == 0 {
            return Err(Error::InvalidCompressionFactor { k });
        }
        let sigma = max_value.next_power_of_two().max(2);
        Ok(DigestConfig {
            max_value,
            sigma,
            k,
        })
    }

    /// Caller-declared maximum reading value.
    #[inline]
    pub fn max_value(&self) -> u64 {
        self.max_value
    }

    /// Power-of-two domain bound the conceptual tree is built over.
    #[inline]
    pub fn sigma(&self) -> u64 {
        self.sigma
    }

    /// Compression factor; digests hold at most `3k` buckets once compression
    /// is active and answer quantiles within `log2(sigma)/k`.
    #[inline]
    pub fn compression_factor(&self) -> u64 {
        self.k
    }

    /// Tree height `log2(sigma)`: the number of levels below the root.
    #[inline]
    pub fn levels(&self) -> u32 {
        self.sigma.ilog2()
    }

    /// Compression threshold `floor(n / k)`. A zero threshold disables
    /// compression entirely (the digest stays exact).
    #[inline]
    pub fn threshold(&self, n: u64) -> u64 {
        n / self.k
    }

    /// Worst-case relative quantile error `log2(sigma) / k`.
    #[inline]
    pub fn epsilon(&self) -> f64 {
        self.levels() as f64 / self.k as f64
    }

    /// A-priori rank error budget `ceil(log2(sigma) * n / k)`.
    pub fn error_budget(&self, n: u64) -> u64 {
        let num = self.levels() as u128 * n as u128;
        let k = self.k as u128;
        u64::try_from(num.div_ceil(k)).unwrap_or(u64::MAX)
    }
}
