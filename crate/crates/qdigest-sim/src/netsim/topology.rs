//! Random geometric placement of sensors with fixed radio range.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::SimError;

/// Reseed increment between placement attempts (splitmix64 golden gamma).
const RESEED_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MAX_ATTEMPTS: u32 = 1000;

/// Sensor positions in a square and the connectivity they induce.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    side: f64,
    radio_range: f64,
    positions: Vec<(f64, f64)>,
    neighbors: Vec<Vec<u32>>,
    seed: u64,
    regenerations: u32,
}

/// Scatter `n` sensors uniformly in a square sized to keep `density`
/// (nodes per unit area) constant, linking any two within `radio_range`.
///
/// Placement is deterministic under `seed`. If the resulting connectivity
/// graph is disconnected the placement is redrawn with a derived seed; the
/// number of redraws is recorded on the topology.
pub fn generate_topology(
    n: usize,
    density: f64,
    radio_range: f64,
    seed: u64,
) -> Result<Topology, SimError> {
    if n == 0 {
        return Err(SimError::InvalidParameter("node count must be >= 1".into()));
    }
    if !density.is_finite() || density <= 0.0 {
        return Err(SimError::InvalidParameter(format!(
            "density must be positive, got {density}"
        )));
    }
    if !radio_range.is_finite() || radio_range <= 0.0 {
        return Err(SimError::InvalidParameter(format!(
            "radio range must be positive, got {radio_range}"
        )));
    }

    let side = (n as f64 / density).sqrt();
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(
            seed.wrapping_add((attempt as u64).wrapping_mul(RESEED_GAMMA)),
        );
        let positions: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.random::<f64>() * side, rng.random::<f64>() * side))
            .collect();
        let neighbors = link_by_range(&positions, radio_range);
        if is_connected(&neighbors) {
            return Ok(Topology {
                side,
                radio_range,
                positions,
                neighbors,
                seed,
                regenerations: attempt,
            });
        }
    }
    Err(SimError::PlacementFailed {
        attempts: MAX_ATTEMPTS,
    })
}

impl Topology {
    /// Build a topology from explicit positions, for non-random layouts
    /// (line networks, stars, terrain fixtures). Connectivity is derived
    /// the same way as for random placements.
    pub fn from_positions(positions: Vec<(f64, f64)>, side: f64, radio_range: f64) -> Topology {
        let neighbors = link_by_range(&positions, radio_range);
        Topology {
            side,
            radio_range,
            positions,
            neighbors,
            seed: 0,
            regenerations: 0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.positions.len()
    }

    /// Side length of the deployment square.
    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn radio_range(&self) -> f64 {
        self.radio_range
    }

    pub fn positions(&self) -> &[(f64, f64)] {
        &self.positions
    }

    /// Neighbor ids of `node` in ascending order.
    pub fn neighbors(&self, node: usize) -> &[u32] {
        &self.neighbors[node]
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// How many disconnected placements were redrawn before this one.
    pub fn regenerations(&self) -> u32 {
        self.regenerations
    }
}

fn link_by_range(positions: &[(f64, f64)], range: f64) -> Vec<Vec<u32>> {
    let n = positions.len();
    let range_sq = range * range;
    let mut neighbors = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = positions[i].0 - positions[j].0;
            let dy = positions[i].1 - positions[j].1;
            if dx * dx + dy * dy <= range_sq {
                neighbors[i].push(j as u32);
                neighbors[j].push(i as u32);
            }
        }
    }
    neighbors
}

fn is_connected(neighbors: &[Vec<u32>]) -> bool {
    let n = neighbors.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut visited = 1;
    while let Some(v) = stack.pop() {
        for &w in &neighbors[v] {
            if !seen[w as usize] {
                seen[w as usize] = true;
                visited += 1;
                stack.push(w as usize);
            }
        }
    }
    visited == n
}
