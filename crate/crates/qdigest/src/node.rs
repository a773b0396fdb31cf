//! Level-order node ids over the conceptual complete binary tree.
//!
//! The tree spans the value domain `[1, sigma]`. The root is id 1, the
//! children of id `i` are `2i` and `2i + 1`, and the leaves occupy ids
//! `sigma ..= 2*sigma - 1`, mapping left to right onto values `1 ..= sigma`.

use crate::error::Error;

/// Identifier of a bucket in the conceptual tree, in `[1, 2*sigma - 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u64);

impl NodeId {
    /// The root bucket, covering the whole domain `[1, sigma]`.
    #[inline]
    pub const fn root() -> Self {
        NodeId(1)
    }

    /// Leaf id holding the single value `value`.
    #[inline]
    pub fn leaf_for(value: u64, sigma: u64) -> Self {
        debug_assert!((1..=sigma).contains(&value));
        NodeId(sigma + value - 1)
    }

    #[inline]
    pub fn parent(self) -> Self {
        debug_assert!(self.0 > 1);
        NodeId(self.0 >> 1)
    }

    #[inline]
    pub fn sibling(self) -> Self {
        debug_assert!(self.0 > 1);
        NodeId(self.0 ^ 1)
    }

    #[inline]
    pub fn left_child(self) -> Self {
        NodeId(self.0 << 1)
    }

    #[inline]
    pub fn right_child(self) -> Self {
        NodeId((self.0 << 1) | 1)
    }

    /// Depth below the root: the root is level 0, leaves are `log2(sigma)`.
    #[inline]
    pub fn level(self) -> u32 {
        debug_assert!(self.0 >= 1);
        self.0.ilog2()
    }

    #[inline]
    pub fn is_root(self) -> bool {
        self.0 == 1
    }

    #[inline]
    pub fn is_leaf(self, sigma: u64) -> bool {
        self.0 >= sigma
    }

    /// The contiguous value interval `[min, max]` this bucket covers.
    pub fn range(self, sigma: u64) -> (u64, u64) {
        debug_assert!(sigma.is_power_of_two());
        debug_assert!(self.0 >= 1 && self.0 < 2 * sigma);
        let shift = sigma.ilog2() - self.level();
        let first_leaf = self.0 << shift;
        let last_leaf = first_leaf + (1u64 << shift) - 1;
        (first_leaf - sigma + 1, last_leaf - sigma + 1)
    }

    /// Width of the covered interval (1 for leaves, `sigma` for the root).
    #[inline]
    pub fn width(self, sigma: u64) -> u64 {
        1u64 << (sigma.ilog2() - self.level())
    }

    /// Value held by this leaf; callers must ensure `is_leaf`.
    #[inline]
    pub fn leaf_value(self, sigma: u64) -> u64 {
        debug_assert!(self.is_leaf(sigma));
        self.0 - sigma + 1
    }
}

/// Checked variant of [`NodeId::range`]: the value interval covered by `id`
/// in a tree over `[1, sigma]`.
pub fn node_range(id: u64, sigma: u64) -> Result<(u64, u64), Error> {
    if !sigma.is_power_of_two() || sigma < 2 {
        return Err(Error::SigmaNotPowerOfTwo { sigma });
    }
    if id == 0 || id > 2 * sigma - 1 {
        return Err(Error::NodeIdOutOfRange { id, sigma });
    }
    Ok(NodeId(id).range(sigma))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_covers_whole_domain() {
        assert_eq!(node_range(1, 8).unwrap(), (1, 8));
    }

    #[test]
    fn leaf_and_interior_ranges() {
        // Leaf id 11 is the bucket for value 4 when sigma = 8.
        assert_eq!(node_range(11, 8).unwrap(), (4, 4));
        // Id 6 covers [5, 6].
        assert_eq!(node_range(6, 8).unwrap(), (5, 6));
    }

    #[test]
    fn children_partition_parent() {
        let sigma = 64;
        for id in 1..sigma {
            let (lo, hi) = NodeId(id).range(sigma);
            let (llo, lhi) = NodeId(id).left_child().range(sigma);
            let (rlo, rhi) = NodeId(id).right_child().range(sigma);
            assert_eq!(llo, lo);
            assert_eq!(lhi + 1, rlo);
            assert_eq!(rhi, hi);
        }
    }

    #[test]
    fn rejects_out_of_range_ids() {
        assert!(matches!(
            node_range(0, 8),
            Err(Error::NodeIdOutOfRange { .. })
        ));
        assert!(matches!(
            node_range(16, 8),
            Err(Error::NodeIdOutOfRange { .. })
        ));
        assert!(matches!(
            node_range(3, 6),
            Err(Error::SigmaNotPowerOfTwo { .. })
        ));
    }

    #[test]
    fn parent_sibling_arithmetic() {
        assert_eq!(NodeId(11).parent(), NodeId(5));
        assert_eq!(NodeId(11).sibling(), NodeId(10));
        assert_eq!(NodeId(10).sibling(), NodeId(11));
        assert_eq!(NodeId(1).level(), 0);
        assert_eq!(NodeId(11).level(), 3);
        assert!(NodeId(8).is_leaf(8));
        assert!(!NodeId(7).is_leaf(8));
        assert_eq!(NodeId::leaf_for(4, 8), NodeId(11));
        assert_eq!(NodeId(11).leaf_value(8), 4);
    }
}
