//! Exact brute-force reference answers over raw readings.
//!
//! Everything here is computed from the full multiset of readings, so the
//! answers are ground truth. Tests and the simulator's error reporting use
//! this module to measure how far digest answers drift; nothing in here may
//! depend on the digest implementation.

use alloc::collections::BTreeMap;

use crate::error::Error;

/// Exact multiset of readings stored as value -> frequency.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyVector {
    counts: BTreeMap<u64, u64>,
    n: u64,
}

impl FrequencyVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_readings(readings: &[u64]) -> Self {
        let mut fv = Self::new();
        for &r in readings {
            fv.add(r, 1);
        }
        fv
    }

    /// Record `freq` additional occurrences of `value` (values start at 1).
    pub fn add(&mut self, value: u64, freq: u64) {
        assert!(value >= 1, "values start at 1");
        if freq == 0 {
            return;
        }
        *self.counts.entry(value).or_insert(0) += freq;
        self.n += freq;
    }

    /// Total number of readings.
    #[inline]
    pub fn total_count(&self) -> u64 {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Frequency of a single value (0 when absent).
    #[inline]
    pub fn frequency(&self, value: u64) -> u64 {
        self.counts.get(&value).copied().unwrap_or(0)
    }

    /// Number of distinct stored values.
    #[inline]
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// Iterate `(value, frequency)` pairs in ascending value order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&v, &f)| (v, f))
    }

    /// Number of readings strictly less than `x`.
    pub fn exact_rank(&self, x: u64) -> u64 {
        self.counts.range(..x).map(|(_, &f)| f).sum()
    }

    /// The value at 1-based position `ceil(q * n)` of the sorted multiset.
    ///
    /// The position is clamped to `[1, n]`, which matches the digest's
    /// "running sum >= q*n" stopping rule so the error-window tests are tight.
    pub fn exact_quantile(&self, q: f64) -> Result<u64, Error> {
        if self.n == 0 {
            return Err(Error::EmptyDigest);
        }
        let position = ceil_fraction(q, self.n).clamp(1, self.n);
        let mut seen = 0u64;
        for (&value, &freq) in &self.counts {
            seen += freq;
            if seen >= position {
                return Ok(value);
            }
        }
        unreachable!("position is clamped to the total count");
    }

    /// All values whose frequency exceeds `s * n`.
    pub fn exact_frequent(&self, s: f64) -> alloc::vec::Vec<u64> {
        let threshold = s * self.n as f64;
        self.counts
            .iter()
            .filter(|(_, &f)| f as f64 > threshold)
            .map(|(&v, _)| v)
            .collect()
    }

    /// Distance from `q * n` to the rank interval of `value`.
    ///
    /// A duplicated value occupies a run of positions in the sorted multiset;
    /// its rank is anywhere in `[exact_rank(value), exact_rank(value) + freq]`.
    /// The reported error is how far `q * n` falls outside that interval.
    pub fn quantile_rank_error(&self, q: f64, value: u64) -> f64 {
        let target = q * self.n as f64;
        let below = self.exact_rank(value) as f64;
        let through = below + self.frequency(value) as f64;
        if target < below {
            below - target
        } else if target > through {
            target - through
        } else {
            0.0
        }
    }
}

impl FromIterator<(u64, u64)> for FrequencyVector {
    fn from_iter<I: IntoIterator<Item = (u64, u64)>>(iter: I) -> Self {
        let mut fv = Self::new();
        for (v, f) in iter {
            fv.add(v, f);
        }
        fv
    }
}

/// `ceil(q * n)` without `f64::ceil` (unavailable without std).
fn ceil_fraction(q: f64, n: u64) -> u64 {
    let x = q * n as f64;
    if x <= 0.0 {
        return 0;
    }
    let trunc = x as u64;
    if trunc as f64 == x {
        trunc
    } else {
        trunc + 1
    }
}
