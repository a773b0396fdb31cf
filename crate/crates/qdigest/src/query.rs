//! Queries over a digest: quantiles, ranks, ranges, frequent values and the
//! per-digest error certificate.

use alloc::vec::Vec;

use crate::digest::QDigest;
use crate::error::Error;
use crate::node::NodeId;

/// Result of a quantile query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantileAnswer {
    /// Estimated value; its rank lies in `[q*n, q*n + error_budget]`.
    pub value: u64,
    /// A-priori rank error bound `ceil(log2(sigma)/k * n)`.
    pub error_budget: u64,
}

/// Result of a rank-type query (inverse quantile or range count).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankAnswer {
    /// Estimated rank in `[0, n]`. For a range count, the error bound is
    /// twice the budget (two rank estimates are subtracted).
    pub rank: u64,
    /// A-priori rank error bound `ceil(log2(sigma)/k * n)`.
    pub error_budget: u64,
}

/// Digest-specific error certificate.
///
/// `weight` is the maximum, over root-to-leaf paths of the conceptual tree,
/// of the summed counts of stored non-leaf buckets along the path. Every
/// quantile answer's rank error is at most `weight`, and `theta = weight / n`
/// never exceeds the worst-case bound `log2(sigma) / k`. Stored leaf counts
/// are excluded: a leaf bucket is exact and contributes no error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceReport {
    /// Maximum path weight as a count.
    pub weight: u64,
    /// `weight / n`; 0 for an empty digest.
    pub theta: f64,
}

impl QDigest {
    /// The value whose rank in the sorted multiset is (approximately) `q * n`.
    ///
    /// Scans the stored buckets in ascending order of right endpoint (ties
    /// broken by putting smaller ranges first, a post-order traversal) and
    /// reports the right endpoint of the first bucket at which the running
    /// count reaches `q * n`. The returned value's true rank `r` satisfies
    /// `q*n <= r <= q*n + error_budget`: the error is one-sided.
    pub fn quantile(&self, q: f64) -> Result<QuantileAnswer, Error> {
        if self.is_empty() {
            return Err(Error::EmptyDigest);
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::QuantileOutOfRange { q });
        }
        let target = q * self.total_count() as f64;
        let mut running = 0u64;
        for (id, count) in self.post_order() {
            running += count;
            if running as f64 >= target {
                let (_, max) = id.range(self.config().sigma());
                return Ok(QuantileAnswer {
                    // a bucket may spill past the declared maximum when the
                    // domain was padded to a power of two
                    value: max.min(self.config().max_value()),
                    error_budget: self.config().error_budget(self.total_count()),
                });
            }
        }
        unreachable!("running count reaches n >= q*n");
    }

    /// Estimated number of readings strictly less than `x`.
    ///
    /// Sums the counts of buckets whose entire range lies below `x`. Values
    /// hidden in wider buckets are not counted, so the estimate can fall
    /// short of the true rank by up to the error budget (and never exceeds
    /// it by more).
    pub fn inverse_quantile(&self, x: u64) -> Result<RankAnswer, Error> {
        if x == 0 || x > self.config().max_value() {
            return Err(Error::ValueOutOfRange {
                value: x,
                max_value: self.config().max_value(),
            });
        }
        Ok(RankAnswer {
            rank: self.rank_below(x),
            error_budget: self.config().error_budget(self.total_count()),
        })
    }

    /// Estimated number of readings in the closed interval `[low, high]`.
    ///
    /// The difference of two rank estimates, so the error is bounded by
    /// twice the budget. The upper boundary is closed: `[1, max_value]`
    /// counts every reading.
    pub fn range_count(&self, low: u64, high: u64) -> Result<RankAnswer, Error> {
        if low > high {
            return Err(Error::InvalidRange { low, high });
        }
        if low == 0 || high > self.config().max_value() {
            return Err(Error::ValueOutOfRange {
                value: if low == 0 { low } else { high },
                max_value: self.config().max_value(),
            });
        }
        let above = if high == self.config().max_value() {
            // by definition: the full-domain upper bound is exact
            self.total_count()
        } else {
            self.rank_below(high + 1)
        };
        Ok(RankAnswer {
            rank: above - self.rank_below(low),
            error_budget: self.config().error_budget(self.total_count()),
        })
    }

    /// Values likely reported by more than a fraction `s` of the readings.
    ///
    /// Returns every unit-width bucket whose stored count exceeds
    /// `(s - epsilon) * n`, as `(value, stored count)` pairs in ascending
    /// value order. Every value with true frequency above `s * n` is
    /// included; values between `(s - epsilon) * n` and `s * n` may appear
    /// as false positives. For `s <= epsilon` the threshold is vacuous and
    /// every stored leaf is returned.
    pub fn consensus(&self, s: f64) -> Vec<(u64, u64)> {
        let threshold = (s - self.config().epsilon()) * self.total_count() as f64;
        let sigma = self.config().sigma();
        self.buckets()
            .filter(|(id, count)| id.is_leaf(sigma) && *count as f64 > threshold)
            .map(|(id, count)| (id.leaf_value(sigma), count))
            .collect()
    }

    /// Compute the digest's error certificate.
    ///
    /// Walks every stored non-leaf bucket's ancestor chain; the certificate
    /// is the heaviest chain including the bucket's own count. An
    /// uncompressed digest (all counts at leaves) certifies zero error.
    pub fn confidence_factor(&self) -> ConfidenceReport {
        let sigma = self.config().sigma();
        let mut weight = 0u64;
        for (id, count) in self.buckets() {
            if id.is_leaf(sigma) {
                continue;
            }
            let mut path = count;
            let mut cursor = id;
            while !cursor.is_root() {
                cursor = cursor.parent();
                path += self.bucket(cursor);
            }
            weight = weight.max(path);
        }
        let theta = if self.total_count() == 0 {
            0.0
        } else {
            weight as f64 / self.total_count() as f64
        };
        ConfidenceReport { weight, theta }
    }

    /// Sum of counts over buckets with `range.max < x`, for `x` in
    /// `[1, sigma + 1]`.
    fn rank_below(&self, x: u64) -> u64 {
        let sigma = self.config().sigma();
        self.buckets()
            .filter(|(id, _)| id.range(sigma).1 < x)
            .map(|(_, count)| count)
            .sum()
    }

    /// Buckets ordered by ascending right endpoint, smaller ranges first.
    fn post_order(&self) -> Vec<(NodeId, u64)> {
        let sigma = self.config().sigma();
        let mut list: Vec<(NodeId, u64)> = self.buckets().collect();
        list.sort_unstable_by_key(|(id, _)| {
            let (_, max) = id.range(sigma);
            (max, id.width(sigma))
        });
        list
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::DigestConfig;
    use crate::oracle::FrequencyVector;

    fn cfg(max_value: u64, k: u64) -> DigestConfig {
        DigestConfig::new(max_value, k).unwrap()
    }

    /// The five-bucket digest from the worked compression example:
    /// {(1,1), (6,2), (7,2), (10,4), (11,6)}, sigma = 8, k = 5, n = 15.
    fn example_digest() -> QDigest {
        QDigest::from_buckets(cfg(8, 5), [(1, 1), (6, 2), (7, 2), (10, 4), (11, 6)]).unwrap()
    }

    #[test]
    fn median_of_example_digest() {
        // post-order list is (10,4), (11,6), (6,2), (7,2), (1,1); the running
        // count reaches 10 >= 7.5 at node 11, whose max is the value 4
        let ans = example_digest().quantile(0.5).unwrap();
        assert_eq!(ans.value, 4);
        assert_eq!(ans.error_budget, 9);
    }

    #[test]
    fn uncompressed_digest_answers_exactly() {
        let readings = [9u64, 2, 2, 14, 7, 11, 5];
        let digest = QDigest::from_readings(&readings, cfg(16, 100)).unwrap();
        let fv = FrequencyVector::from_readings(&readings);
        for q in [0.1, 0.3, 0.5, 0.7, 0.9] {
            assert_eq!(
                digest.quantile(q).unwrap().value,
                fv.exact_quantile(q).unwrap()
            );
        }
    }

    #[test]
    fn quantile_domain_errors() {
        let digest = example_digest();
        assert!(matches!(
            digest.quantile(0.0),
            Err(Error::QuantileOutOfRange { .. })
        ));
        assert!(matches!(
            digest.quantile(1.0),
            Err(Error::QuantileOutOfRange { .. })
        ));
        let empty = QDigest::empty(cfg(8, 5));
        assert!(matches!(empty.quantile(0.5), Err(Error::EmptyDigest)));
    }

    #[test]
    fn inverse_quantile_of_example_digest() {
        let digest = example_digest();
        // only bucket (10, 4) has max < 4; true rank is 5, budget 9
        assert_eq!(digest.inverse_quantile(4).unwrap().rank, 4);
        assert_eq!(digest.inverse_quantile(1).unwrap().rank, 0);
        assert!(matches!(
            digest.inverse_quantile(9),
            Err(Error::ValueOutOfRange { .. })
        ));
        assert!(matches!(
            digest.inverse_quantile(0),
            Err(Error::ValueOutOfRange { .. })
        ));
    }

    #[test]
    fn inverse_quantile_exact_on_uncompressed() {
        let readings = [1u64, 3, 3, 8, 8, 8, 15];
        let digest = QDigest::from_readings(&readings, cfg(16, 100)).unwrap();
        let fv = FrequencyVector::from_readings(&readings);
        for x in 1..=16 {
            assert_eq!(digest.inverse_quantile(x).unwrap().rank, fv.exact_rank(x));
        }
    }

    #[test]
    fn range_count_of_example_digest() {
        let digest = example_digest();
        assert_eq!(digest.range_count(3, 4).unwrap().rank, 10);
        assert_eq!(digest.range_count(1, 8).unwrap().rank, 15);
        assert!(matches!(
            digest.range_count(5, 3),
            Err(Error::InvalidRange { .. })
        ));
        assert!(matches!(
            digest.range_count(1, 9),
            Err(Error::ValueOutOfRange { .. })
        ));
    }

    #[test]
    fn full_range_is_exact_with_padded_domain() {
        // declared max 6 pads to sigma 8; [1, 6] must still count everything
        let digest = QDigest::from_readings(&[1, 2, 5, 6, 6], cfg(6, 1)).unwrap();
        assert_eq!(digest.range_count(1, 6).unwrap().rank, 5);
    }

    #[test]
    fn consensus_of_example_digest() {
        // epsilon = 0.6, s = 0.35: threshold is negative, every stored unit
        // bucket qualifies
        let hits = example_digest().consensus(0.35);
        assert_eq!(hits, alloc::vec![(3, 4), (4, 6)]);
    }

    #[test]
    fn consensus_exact_on_uncompressed() {
        let readings = [4u64, 4, 4, 4, 9, 9, 2];
        let digest = QDigest::from_readings(&readings, cfg(16, 1000)).unwrap();
        let hits = digest.consensus(0.5);
        assert_eq!(hits, alloc::vec![(4, 4)]);
    }

    #[test]
    fn confidence_of_example_digest() {
        // heaviest chain of stored non-leaf counts: root (1) -> node 6 or 7
        // (2), weight 3 over n = 15
        let report = example_digest().confidence_factor();
        assert_eq!(report.weight, 3);
        assert!((report.theta - 0.2).abs() < 1e-12);
    }

    #[test]
    fn confidence_zero_for_leaf_only_digest() {
        let digest = QDigest::from_readings(&[1, 5, 9], cfg(16, 100)).unwrap();
        let report = digest.confidence_factor();
        assert_eq!(report.weight, 0);
        assert_eq!(report.theta, 0.0);

        let empty = QDigest::empty(cfg(16, 3));
        assert_eq!(empty.confidence_factor().theta, 0.0);
    }

    #[test]
    fn quantile_clamps_to_declared_maximum() {
        // single reading of 6 in a domain padded to 8: a folded bucket's max
        // can reach 8, the answer must not
        let digest = QDigest::from_buckets(cfg(6, 1), [(1, 4)]).unwrap();
        assert_eq!(digest.quantile(0.5).unwrap().value, 6);
    }
}
