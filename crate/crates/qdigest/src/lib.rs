//! Mergeable approximate-quantile summaries with provable size and error
//! bounds.
//!
//! A q-digest summarizes a multiset of integer readings from `[1, sigma]`
//! as a set of counted buckets drawn from a complete binary partition tree
//! over the value domain. Two digests built with the same configuration can
//! be merged into a digest of the combined data without losing the error
//! guarantee, which makes the structure a natural fit for in-network
//! aggregation: each hop folds its children's summaries into a bounded-size
//! message instead of forwarding raw readings.
//!
//! With compression factor `k`, a digest holds at most `3k` buckets and
//! answers any quantile query with one-sided rank error at most
//! `log2(sigma)/k * n`. Besides quantiles, the digest answers inverse
//! quantile (rank), range count and consensus (frequent values) queries, and
//! carries a per-instance error certificate that is usually far tighter than
//! the worst-case bound.
//!
//! ```
//! use qdigest::{DigestConfig, QDigest};
//!
//! let config = DigestConfig::new(65536, 33)?;
//! let left = QDigest::from_readings(&[10, 20, 20, 500], config)?;
//! let right = QDigest::from_readings(&[15, 40000], config)?;
//! let combined = left.merge(&right)?;
//!
//! let median = combined.quantile(0.5)?;
//! assert_eq!(median.value, 20);
//! # Ok::<(), qdigest::Error>(())
//! ```
//!
//! The crate is `no_std`-compatible (it allocates, so an allocator is
//! required). Digests are plain immutable values: operations return new
//! digests and nothing is shared internally, so values can move freely
//! across threads.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod codec;
mod config;
mod digest;
mod error;
mod node;
pub mod oracle;
mod query;
mod validate;

pub use codec::{MAGIC, VERSION};
pub use config::DigestConfig;
pub use digest::QDigest;
pub use error::{DecodeError, Error};
pub use node::{node_range, NodeId};
pub use query::{ConfidenceReport, QuantileAnswer, RankAnswer};
pub use validate::Violation;
