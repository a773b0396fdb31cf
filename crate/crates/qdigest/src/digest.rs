//! The q-digest structure: construction, compression and merging.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::config::DigestConfig;
use crate::error::Error;
use crate::node::NodeId;
use crate::oracle::FrequencyVector;

/// A mergeable quantile summary over integer readings in `[1, max_value]`.
///
/// The digest is a sparse set of counted buckets drawn from the conceptual
/// complete binary tree over the value domain. Compression folds families
/// whose combined count falls below `floor(n / k)` into the parent bucket,
/// which caps the bucket count at `3k` while keeping every quantile answer
/// within a rank error of `log2(sigma)/k * n`.
///
/// Digests are immutable values: every operation returns a new digest, so
/// they can be freely shared and merged across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QDigest {
    config: DigestConfig,
    buckets: BTreeMap<NodeId, u64>,
    n: u64,
}

impl QDigest {
    /// Digest of an empty multiset; the identity element for [`merge`](Self::merge).
    pub fn empty(config: DigestConfig) -> Self {
        QDigest {
            config,
            buckets: BTreeMap::new(),
            n: 0,
        }
    }

    /// The trivial digest of a single reading: one leaf bucket of count 1.
    pub fn from_value(value: u64, config: DigestConfig) -> Result<Self, Error> {
        Self::from_frequencies(
            &core::iter::once((value, 1)).collect::<FrequencyVector>(),
            config,
        )
    }

    /// Build from a slice of raw readings.
    pub fn from_readings(readings: &[u64], config: DigestConfig) -> Result<Self, Error> {
        for &r in readings {
            Self::check_value(r, &config)?;
        }
        Self::from_frequencies(&FrequencyVector::from_readings(readings), config)
    }

    /// Build from a value -> frequency map: each value's frequency is placed
    /// at its leaf, then the digest is compressed once.
    pub fn from_frequencies(
        frequencies: &FrequencyVector,
        config: DigestConfig,
    ) -> Result<Self, Error> {
        let mut buckets = BTreeMap::new();
        let mut n: u64 = 0;
        for (value, freq) in frequencies.iter() {
            Self::check_value(value, &config)?;
            if freq == 0 {
                continue;
            }
            buckets.insert(NodeId::leaf_for(value, config.sigma()), freq);
            n = n.checked_add(freq).ok_or(Error::CountOverflow)?;
        }
        let mut digest = QDigest { config, buckets, n };
        digest.compress_in_place();
        Ok(digest)
    }

    /// Assemble a digest from explicit `(node id, count)` buckets.
    ///
    /// Only structural validity is enforced (ids in range, counts nonzero);
    /// the digest property is not, so the result may fail
    /// [`validate`](QDigest::validate), which is what makes this useful for
    /// tests and for the decoder.
    pub fn from_buckets<I>(config: DigestConfig, buckets: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (u64, u64)>,
    {
        let mut map = BTreeMap::new();
        let mut n: u64 = 0;
        let max_id = 2 * config.sigma() - 1;
        for (id, count) in buckets {
            if id == 0 || id > max_id {
                return Err(Error::NodeIdOutOfRange {
                    id,
                    sigma: config.sigma(),
                });
            }
            if count == 0 {
                return Err(Error::ZeroBucketCount { id });
            }
            n = n.checked_add(count).ok_or(Error::CountOverflow)?;
            *map.entry(NodeId(id)).or_insert(0) += count;
        }
        Ok(QDigest {
            config,
            buckets: map,
            n,
        })
    }

    #[inline]
    pub fn config(&self) -> &DigestConfig {
        &self.config
    }

    /// Total number of readings summarized (`n`).
    #[inline]
    pub fn total_count(&self) -> u64 {
        self.n
    }

    /// Number of stored buckets.
    #[inline]
    pub fn bucket_count(&self) -> usize {
        self.buckets.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Stored buckets in ascending node-id order.
    pub fn buckets(&self) -> impl Iterator<Item = (NodeId, u64)> + '_ {
        self.buckets.iter().map(|(&id, &c)| (id, c))
    }

    /// Count stored at a node, 0 when absent.
    #[inline]
    pub fn bucket(&self, id: NodeId) -> u64 {
        self.buckets.get(&id).copied().unwrap_or(0)
    }

    /// Re-establish the digest property at the current `n` and `k`.
    ///
    /// Folds every family whose combined count falls below `floor(n / k)`
    /// into its parent, sweeping level by level from the leaves upward and
    /// repeating the sweep until no family can be folded. Within a level,
    /// parents are visited in ascending id order, so results are identical
    /// across platforms. Idempotent at fixed `n` and `k`.
    pub fn compress(&self) -> Self {
        let mut out = self.clone();
        out.compress_in_place();
        out
    }

    /// Merge two digests built with the same configuration.
    ///
    /// Takes the union of the bucket maps (adding counts of identical node
    /// ids), then compresses at threshold `floor((n1 + n2) / k)`. The result
    /// summarizes `n1 + n2` readings with the same relative error bound as
    /// the inputs.
    pub fn merge(&self, other: &QDigest) -> Result<Self, Error> {
        if self.config != other.config {
            return Err(Error::ConfigMismatch);
        }
        let n = self.n.checked_add(other.n).ok_or(Error::CountOverflow)?;
        let mut buckets = self.buckets.clone();
        for (&id, &count) in &other.buckets {
            let slot = buckets.entry(id).or_insert(0);
            *slot = slot.checked_add(count).ok_or(Error::CountOverflow)?;
        }
        let mut merged = QDigest {
            config: self.config,
            buckets,
            n,
        };
        merged.compress_in_place();
        Ok(merged)
    }

    fn check_value(value: u64, config: &DigestConfig) -> Result<(), Error> {
        if value == 0 || value > config.max_value() {
            return Err(Error::ValueOutOfRange {
                value,
                max_value: config.max_value(),
            });
        }
        Ok(())
    }

    fn compress_in_place(&mut self) {
        let threshold = self.config.threshold(self.n);
        if threshold == 0 {
            return;
        }
        while self.sweep(threshold) {}
    }

    /// One bottom-up sweep; returns whether any family was folded. A fold at
    /// a lower level can re-expose a family higher up (or orphan a surviving
    /// child below a folded parent), hence the fixpoint loop above.
    fn sweep(&mut self, threshold: u64) -> bool {
        let mut changed = false;
        let mut parents: Vec<NodeId> = Vec::new();
        for child_level in (1..=self.config.levels()).rev() {
            let lo = NodeId(1u64 << child_level);
            let hi = NodeId((1u64 << (child_level + 1)) - 1);
            parents.clear();
            parents.extend(self.buckets.range(lo..=hi).map(|(&id, _)| id.parent()));
            parents.dedup();
            for &parent in &parents {
                let left = self.bucket(parent.left_child());
                let right = self.bucket(parent.right_child());
                let family = self.bucket(parent) + left + right;
                if family < threshold {
                    self.buckets.remove(&parent.left_child());
                    self.buckets.remove(&parent.right_child());
                    self.buckets.insert(parent, family);
                    changed = true;
                }
            }
        }
        changed
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn cfg(max_value: u64, k: u64) -> DigestConfig {
        DigestConfig::new(max_value, k).unwrap()
    }

    fn bucket_list(digest: &QDigest) -> Vec<(u64, u64)> {
        digest.buckets().map(|(id, c)| (id.0, c)).collect()
    }

    /// The worked example: n = 15 readings over [1, 8] at k = 5 compress to
    /// exactly five buckets.
    #[test]
    fn worked_compression_example() {
        let fv: FrequencyVector = [(1, 1), (3, 4), (4, 6), (5, 1), (6, 1), (7, 1), (8, 1)]
            .into_iter()
            .collect();
        let digest = QDigest::from_frequencies(&fv, cfg(8, 5)).unwrap();
        assert_eq!(digest.total_count(), 15);
        assert_eq!(
            bucket_list(&digest),
            alloc::vec![(1, 1), (6, 2), (7, 2), (10, 4), (11, 6)]
        );
    }

    #[test]
    fn singleton_digest_is_one_leaf() {
        let digest = QDigest::from_value(5, cfg(8, 7)).unwrap();
        assert_eq!(digest.total_count(), 1);
        assert_eq!(bucket_list(&digest), alloc::vec![(12, 1)]);
    }

    #[test]
    fn leaf_pairs_fold_but_top_pair_does_not() {
        // n = 4, k = 1 -> threshold 4: leaf families sum to 2 and fold;
        // the top family sums to exactly 4 and stays.
        let digest = QDigest::from_readings(&[1, 2, 3, 4], cfg(4, 1)).unwrap();
        assert_eq!(bucket_list(&digest), alloc::vec![(2, 2), (3, 2)]);
    }

    #[test]
    fn threshold_zero_is_identity() {
        let digest = QDigest::from_readings(&[1, 5, 9, 13], cfg(16, 5)).unwrap();
        // n = 4 < k = 5: no folding, raw leaves survive
        assert_eq!(digest.bucket_count(), 4);
        for (id, _) in digest.buckets() {
            assert!(id.is_leaf(16));
        }
        assert_eq!(digest.compress(), digest);
    }

    #[test]
    fn rejects_out_of_domain_values() {
        assert!(matches!(
            QDigest::from_readings(&[3, 9], cfg(8, 2)),
            Err(Error::ValueOutOfRange { value: 9, .. })
        ));
        assert!(matches!(
            QDigest::from_readings(&[0], cfg(8, 2)),
            Err(Error::ValueOutOfRange { value: 0, .. })
        ));
        // declared max 6, padded domain 8: 7 is still rejected
        assert!(matches!(
            QDigest::from_readings(&[7], cfg(6, 2)),
            Err(Error::ValueOutOfRange { value: 7, .. })
        ));
    }

    #[test]
    fn merge_requires_identical_config() {
        let a = QDigest::from_value(1, cfg(8, 2)).unwrap();
        let b = QDigest::from_value(1, cfg(8, 3)).unwrap();
        assert!(matches!(a.merge(&b), Err(Error::ConfigMismatch)));
    }

    #[test]
    fn merge_with_empty_is_compress() {
        let digest = QDigest::from_readings(&[2, 2, 3, 7, 8, 8], cfg(8, 3)).unwrap();
        let merged = digest.merge(&QDigest::empty(cfg(8, 3))).unwrap();
        assert_eq!(merged, digest.compress());
        assert_eq!(merged, digest); // already compressed
    }

    #[test]
    fn merge_adds_counts_and_n() {
        let a = QDigest::from_readings(&[1, 1, 2], cfg(4, 1)).unwrap();
        let b = QDigest::from_readings(&[1, 3, 4], cfg(4, 1)).unwrap();
        let m = a.merge(&b).unwrap();
        assert_eq!(m.total_count(), 6);
        let total: u64 = m.buckets().map(|(_, c)| c).sum();
        assert_eq!(total, 6);
    }

    /// Two valid digests (n = 200 each, k = 10) whose union exposes family
    /// sums 36 and 39 against threshold 40; both parents absorb their
    /// children.
    #[test]
    fn merge_folds_families_under_threshold() {
        let config = cfg(64, 10);
        let q1 = QDigest::from_buckets(config, [(32, 20), (33, 10), (16, 6), (17, 14), (127, 150)])
            .unwrap();
        let q2 = QDigest::from_buckets(config, [(34, 13), (35, 12), (126, 175)]).unwrap();
        assert!(q1.validate().is_empty());
        assert!(q2.validate().is_empty());

        let merged = q1.merge(&q2).unwrap();
        assert_eq!(merged.total_count(), 400);
        // Delta at node 16 = 6+20+10 = 36 < 40, at node 17 = 14+13+12 = 39 < 40
        assert_eq!(
            bucket_list(&merged),
            alloc::vec![(16, 36), (17, 39), (126, 175), (127, 150)]
        );
    }

    #[test]
    fn merge_is_commutative() {
        let a = QDigest::from_readings(&[1, 4, 4, 9, 13, 16], cfg(16, 2)).unwrap();
        let b = QDigest::from_readings(&[2, 2, 2, 5, 11], cfg(16, 2)).unwrap();
        assert_eq!(a.merge(&b).unwrap(), b.merge(&a).unwrap());
    }

    #[test]
    fn merge_overflow_is_an_error() {
        let config = cfg(4, 1);
        let a = QDigest::from_buckets(config, [(4, u64::MAX)]).unwrap();
        let b = QDigest::from_buckets(config, [(5, 1)]).unwrap();
        assert!(matches!(a.merge(&b), Err(Error::CountOverflow)));
    }

    #[test]
    fn smallest_domain_works() {
        // max_value 1 pads to sigma 2: leaves are ids 2 and 3
        let digest = QDigest::from_readings(&[1, 1, 1], cfg(1, 1)).unwrap();
        assert_eq!(bucket_list(&digest), alloc::vec![(2, 3)]);
        assert_eq!(digest.quantile(0.5).unwrap().value, 1);
    }

    #[test]
    fn digests_move_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<QDigest>();
    }

    #[test]
    fn from_buckets_validates_structure() {
        let config = cfg(8, 2);
        assert!(matches!(
            QDigest::from_buckets(config, [(0, 3)]),
            Err(Error::NodeIdOutOfRange { .. })
        ));
        assert!(matches!(
            QDigest::from_buckets(config, [(16, 3)]),
            Err(Error::NodeIdOutOfRange { .. })
        ));
        assert!(matches!(
            QDigest::from_buckets(config, [(3, 0)]),
            Err(Error::ZeroBucketCount { .. })
        ));
    }
}
