//! Sensor-network simulation harness for q-digest aggregation.
//!
//! Models the one-shot query experiment: sensors are scattered uniformly in
//! a square, linked when within radio range, organized into a BFS routing
//! tree rooted at a base station, and then aggregate their readings up the
//! tree, either as bounded-size digests or as an exact `list` baseline.
//! Reports capture per-node message sizes, query errors against the exact
//! oracle, and residual battery power under a per-byte transmission cost.

pub mod cli;
pub mod datasets;
pub mod error;
pub mod netsim;

pub use error::SimError;
