//! Counter-based deterministic randomness.
//!
//! Every random quantity in this crate is a pure function of a 64-bit seed
//! and a structural index (tree address, axis, point number, ...). Nothing
//! carries mutable RNG state, so any evaluation order — sequential, rayon,
//! re-queried years later — produces bit-identical values.
//!
//! The mixing function is splitmix64's finalizer, chained over the inputs.
//! It is version-pinned: changing any constant below changes every golden
//! value and must bump [`HASH_VERSION`].

/// Identifier of the (seed, address) → randomness mixing scheme.
///
/// Recorded in provenance files; replay refuses to run across versions.
pub const HASH_VERSION: &str = "v1";

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
const CHILD_SALT: u64 = 0xd134_2543_de82_ef95;
const LANE_SALT: u64 = 0xa076_1d64_78bd_642f;

/// splitmix64 finalizer: a fast 64-bit avalanche permutation.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Top 53 bits of a word mapped into the open interval (0, 1).
#[inline]
pub fn u64_to_open_unit(x: u64) -> f64 {
    // (x >> 11) ∈ [0, 2^53); the +0.5 keeps 0 and 1 unreachable.
    ((x >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
}

/// Hash state attached to one node of the subdivision tree.
///
/// States chain down the tree: the root state is derived from the seed and
/// the spatial dimension, each child mixes in its subdivision symbol. A
/// node's state therefore depends on its full path and nothing else.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeState(u64);

impl NodeState {
    #[inline]
    pub fn root(seed: u64, dim: u32) -> Self {
        NodeState(mix64(
            mix64(seed ^ GAMMA) ^ (dim as u64).wrapping_mul(CHILD_SALT),
        ))
    }

    #[inline]
    pub fn child(self, symbol: u32) -> Self {
        NodeState(mix64(self.0 ^ (symbol as u64 + 1).wrapping_mul(CHILD_SALT)))
    }

    /// One uniform in (0,1) per (node, lane).
    #[inline]
    pub fn uniform(self, lane: u64) -> f64 {
        u64_to_open_unit(mix64(self.0 ^ (lane + 1).wrapping_mul(LANE_SALT)))
    }

    /// A pair of uniforms in (0,1), lanes 2k and 2k+1.
    #[inline]
    pub fn uniform_pair(self, pair: u64) -> (f64, f64) {
        (self.uniform(2 * pair), self.uniform(2 * pair + 1))
    }
}

/// The i-th derived seed of a master seed (seed fan-out for experiments).
#[inline]
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master ^ GAMMA) ^ index.wrapping_mul(LANE_SALT))
}

/// One uniform indexed by two counters, for flat (non-tree) sampling.
#[inline]
pub fn indexed_uniform(seed: u64, a: u64, b: u64) -> f64 {
    let s = mix64(mix64(seed ^ GAMMA) ^ a.wrapping_mul(CHILD_SALT));
    u64_to_open_unit(mix64(s ^ b.wrapping_mul(LANE_SALT)))
}
