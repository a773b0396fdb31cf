//! Network model: random geometric placement, BFS routing and bottom-up
//! aggregation with byte and power accounting.

mod aggregate;
mod routing;
mod topology;

pub use aggregate::{
    budget_to_compression_factor, residual_power, run_aggregation, tuple_bytes, ExperimentReport,
    ListSummary, RootSummary, Scheme,
};
pub use routing::{bfs_tree, RoutingTree};
pub use topology::{generate_topology, Topology};
