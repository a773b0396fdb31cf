//! Structural checks of the digest property, as predicates.

use alloc::vec::Vec;
use core::fmt;

use crate::digest::QDigest;
use crate::node::NodeId;

/// One violated digest property, naming the offending node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// A non-leaf, non-root bucket holds more than `floor(n / k)`.
    OverfullBucket {
        id: NodeId,
        count: u64,
        threshold: u64,
    },
    /// A stored bucket's family (itself, parent, sibling) sums below
    /// `floor(n / k)`; the family should have been folded.
    UnderfullFamily {
        id: NodeId,
        family: u64,
        threshold: u64,
    },
    /// More than `3k` buckets while compression is active.
    TooManyBuckets { buckets: usize, limit: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OverfullBucket {
                id,
                count,
                threshold,
            } => write!(
                f,
                "node {}: count {count} exceeds threshold {threshold}",
                id.0
            ),
            Violation::UnderfullFamily {
                id,
                family,
                threshold,
            } => write!(
                f,
                "node {}: family sum {family} below threshold {threshold}",
                id.0
            ),
            Violation::TooManyBuckets { buckets, limit } => {
                write!(f, "{buckets} buckets exceed the {limit}-bucket bound")
            }
        }
    }
}

impl QDigest {
    /// Check every post-compression invariant; an empty list means the
    /// digest property holds.
    ///
    /// With threshold `floor(n / k) = 0` compression is disabled and only
    /// the (vacuous) count checks apply: an exact digest may exceed `3k`
    /// buckets, so the size bound is not enforced in that regime.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        let threshold = self.config().threshold(self.total_count());
        if threshold == 0 {
            return violations;
        }
        let sigma = self.config().sigma();

        for (id, count) in self.buckets() {
            if !id.is_root() && !id.is_leaf(sigma) && count > threshold {
                violations.push(Violation::OverfullBucket {
                    id,
                    count,
                    threshold,
                });
            }
            if !id.is_root() {
                let family = count + self.bucket(id.parent()) + self.bucket(id.sibling());
                if family < threshold {
                    violations.push(Violation::UnderfullFamily {
                        id,
                        family,
                        threshold,
                    });
                }
            }
        }

        let limit = 3 * self.config().compression_factor() as usize;
        if self.bucket_count() > limit {
            violations.push(Violation::TooManyBuckets {
                buckets: self.bucket_count(),
                limit,
            });
        }
        violations
    }
}
