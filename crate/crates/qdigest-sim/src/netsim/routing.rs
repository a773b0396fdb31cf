//! Breadth-first routing tree rooted at the base station.

use std::collections::VecDeque;

use crate::error::SimError;
use crate::netsim::Topology;

/// Minimum-hop spanning tree: one parent per node, levels = hop counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingTree {
    root: usize,
    parent: Vec<Option<u32>>,
    level: Vec<u32>,
}

/// Build the BFS tree over the connectivity graph.
///
/// Levels are exact hop distances from `root`; among a node's neighbors one
/// hop closer to the root, the lowest id becomes the parent, so the tree is
/// identical across runs and platforms.
pub fn bfs_tree(topology: &Topology, root: usize) -> Result<RoutingTree, SimError> {
    let n = topology.node_count();
    if root >= n {
        return Err(SimError::InvalidParameter(format!(
            "root {root} out of range for {n} nodes"
        )));
    }

    let mut level = vec![u32::MAX; n];
    level[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &w in topology.neighbors(v) {
            if level[w as usize] == u32::MAX {
                level[w as usize] = level[v] + 1;
                queue.push_back(w as usize);
            }
        }
    }
    if let Some(node) = level.iter().position(|&l| l == u32::MAX) {
        return Err(SimError::Unreachable { node, root });
    }

    let parent = (0..n)
        .map(|v| {
            if v == root {
                None
            } else {
                // neighbors are ascending, so `find` picks the lowest id
                topology
                    .neighbors(v)
                    .iter()
                    .copied()
                    .find(|&w| level[w as usize] + 1 == level[v])
            }
        })
        .collect();

    Ok(RoutingTree {
        root,
        parent,
        level,
    })
}

impl RoutingTree {
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    /// Parent of `node`; `None` for the root.
    pub fn parent(&self, node: usize) -> Option<usize> {
        self.parent[node].map(|p| p as usize)
    }

    /// Hop distance from the root.
    pub fn level(&self, node: usize) -> u32 {
        self.level[node]
    }

    /// Node ids ordered deepest level first, ascending id within a level:
    /// the order in which aggregation processes (and sends) summaries.
    pub fn bottom_up_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.node_count()).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(self.level[v]), v));
        order
    }
}
