//! The multiplicative cascade measure on the dyadic tree.
//!
//! Every node of the subdivision tree at depth ≥ 1 carries d independent
//! mean-one weight draws, one per coordinate axis (each level of the 2^d-ary
//! tree halves all d axes, and each halving contributes a weight). The
//! density of the depth-n approximation μ_n is constant on depth-n cubes and
//! equals the product of the nd draws along the cube's ancestor chain, so
//!
//!   μ_n(A) = 2^{−nd} · Σ over depth-n descendants of A of Π(chain draws),
//!
//! and E[μ_n(A)^s] = (2^{−nd})^{φ(s)} with φ(s) = s − log2 E[W^s] when a
//! cube's own depth is the truncation depth.
//!
//! Draws are a pure function of (seed, address, axis) through the chained
//! counter hash in [`crate::rng`]: no tree is ever stored, re-queries are
//! consistent forever, and any parallel enumeration schedule sees identical
//! values. All mass arithmetic is base-2 log domain.

use serde::Serialize;

use crate::dyadic::{DyadicAddress, MAX_DEPTH};
use crate::error::{Error, Result};
use crate::numerics::log2_add;
use crate::rng::{NodeState, HASH_VERSION};
use crate::weights::WeightModel;

/// What stands in for the un-simulated subtree below the truncation depth.
///
/// `MeanOne` replaces the tail factor by its expectation 1 — the omitted
/// factor has depth-independent moments, so it shifts partition-function
/// intercepts but never slopes. `Extended(q)` descends q extra levels for
/// sensitivity studies; `Extended(0)` is `MeanOne`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TailRule {
    MeanOne,
    Extended(u32),
}

impl TailRule {
    #[inline]
    pub fn extra_depth(&self) -> u32 {
        match self {
            TailRule::MeanOne => 0,
            TailRule::Extended(q) => *q,
        }
    }

    pub fn spec_string(&self) -> String {
        match self {
            TailRule::MeanOne => "mean_one".into(),
            TailRule::Extended(q) => format!("extended({q})"),
        }
    }
}

/// A seeded cascade: a deterministic map from addresses to weights and
/// truncated masses.
#[derive(Clone, Copy, Debug)]
pub struct CascadeMeasure {
    seed: u64,
    model: WeightModel,
}

/// A truncated cascade mass in log2 form.
#[derive(Clone, Debug)]
pub struct MassEstimate {
    pub log2_mass: f64,
    pub trunc_depth: u32,
    pub address: DyadicAddress,
    pub tail_rule: TailRule,
}

impl MassEstimate {
    #[inline]
    pub fn value(&self) -> f64 {
        self.log2_mass.exp2()
    }
}

impl CascadeMeasure {
    pub fn new(seed: u64, model: WeightModel) -> Self {
        CascadeMeasure { seed, model }
    }

    #[inline]
    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn model(&self) -> &WeightModel {
        &self.model
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.model.dim()
    }

    /// Identifier of the address→randomness mixing scheme in use.
    #[inline]
    pub fn hash_version(&self) -> &'static str {
        HASH_VERSION
    }

    /// Reseeded copy sharing the same law.
    pub fn with_seed(&self, seed: u64) -> Self {
        CascadeMeasure {
            seed,
            model: self.model,
        }
    }

    #[inline]
    pub(crate) fn root_state(&self) -> NodeState {
        NodeState::root(self.seed, self.dim())
    }

    /// Hash state of a node, chained along its path.
    pub(crate) fn state_at(&self, a: &DyadicAddress) -> NodeState {
        let mut st = self.root_state();
        for level in 0..a.depth() {
            st = st.child(a.symbol(level));
        }
        st
    }

    /// log2 of one axis draw at a node state. Uniform lanes (2·axis,
    /// 2·axis + 1) feed the weight sampler; the draws never sit on a
    /// boundary, so sampling cannot fail.
    #[inline]
    pub(crate) fn log2_axis_weight_at(&self, state: NodeState, axis: u32) -> f64 {
        self.model
            .log2_sample(state.uniform_pair(axis as u64))
            .expect("counter uniforms are strictly inside (0,1)")
    }

    /// log2 of the node's full per-level factor: the product of d draws.
    #[inline]
    pub(crate) fn log2_node_factor_at(&self, state: NodeState) -> f64 {
        let mut acc = 0.0;
        for axis in 0..self.dim() {
            acc += self.log2_axis_weight_at(state, axis);
        }
        acc
    }

    fn require_weighted(&self, a: &DyadicAddress) -> Result<()> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: a.dim(),
            });
        }
        if a.depth() == 0 {
            return Err(Error::Contract(
                "the root carries no weight; node weights start at depth 1".into(),
            ));
        }
        Ok(())
    }

    /// The single W draw attached to (node, axis), axis 0-based.
    ///
    /// Identical inputs give identical outputs forever; for a TwoPoint
    /// model the value is always a or b.
    pub fn axis_weight(&self, a: &DyadicAddress, axis: u32) -> Result<f64> {
        self.require_weighted(a)?;
        if axis >= self.dim() {
            return Err(Error::Contract(format!(
                "axis {axis} out of range for dimension {}",
                self.dim()
            )));
        }
        Ok(self.log2_axis_weight_at(self.state_at(a), axis).exp2())
    }

    /// The node's mass factor: the product of its d axis draws. In d = 1
    /// this is a single W draw.
    pub fn node_weight(&self, a: &DyadicAddress) -> Result<f64> {
        self.require_weighted(a)?;
        Ok(self.log2_node_factor_at(self.state_at(a)).exp2())
    }

    /// log2 of the product of node factors along the chain root→a.
    pub(crate) fn chain_log2(&self, a: &DyadicAddress) -> f64 {
        let mut st = self.root_state();
        let mut acc = 0.0;
        for level in 0..a.depth() {
            st = st.child(a.symbol(level));
            acc += self.log2_node_factor_at(st);
        }
        acc
    }

    /// log2 of Σ over depth-`target` descendants of the chain products
    /// below the given node (empty product = 1 when already at target).
    /// Children combine in symbol order, so the reduction tree is fixed.
    pub(crate) fn subtree_log2_sum(&self, state: NodeState, depth: u32, target: u32) -> f64 {
        if depth == target {
            return 0.0;
        }
        let mut acc = f64::NEG_INFINITY;
        for sym in 0..(1u32 << self.dim()) {
            let cs = state.child(sym);
            let w = self.log2_node_factor_at(cs);
            acc = log2_add(acc, w + self.subtree_log2_sum(cs, depth + 1, target));
        }
        acc
    }

    /// μ_n(a): the truncated mass of a cube, mean-one tail.
    pub fn mass(&self, a: &DyadicAddress, trunc_depth: u32) -> Result<MassEstimate> {
        self.mass_with_tail(a, trunc_depth, TailRule::MeanOne)
    }

    /// μ_n(a) under an explicit tail rule; `Extended(q)` evaluates the
    /// subtree q levels past the truncation depth.
    pub fn mass_with_tail(
        &self,
        a: &DyadicAddress,
        trunc_depth: u32,
        tail: TailRule,
    ) -> Result<MassEstimate> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: a.dim(),
            });
        }
        if trunc_depth < a.depth() {
            return Err(Error::Contract(format!(
                "truncation depth {trunc_depth} is shallower than the cube depth {}",
                a.depth()
            )));
        }
        let target = trunc_depth + tail.extra_depth();
        if target > MAX_DEPTH {
            return Err(Error::DepthOutOfRange {
                depth: target,
                max: MAX_DEPTH,
            });
        }
        let chain = self.chain_log2(a);
        let sub = self.subtree_log2_sum(self.state_at(a), a.depth(), target);
        Ok(MassEstimate {
            log2_mass: -((target * self.dim()) as f64) + chain + sub,
            trunc_depth,
            address: *a,
            tail_rule: tail,
        })
    }

    /// ℓ_n = μ_n([0,1)^d), the total-mass martingale at truncation n.
    pub fn total_mass(&self, trunc_depth: u32) -> Result<f64> {
        let root = DyadicAddress::root(self.dim())?;
        Ok(self.mass(&root, trunc_depth)?.value())
    }

    /// μ_n of the slab { x : x_axis ∈ [1/2 − 2^{−k}, 1/2 + 2^{−k}) },
    /// axis 1-based, summed over the depth-k cubes meeting the slab.
    pub fn slab_mass(&self, axis: u32, level_k: u32, trunc_depth: u32) -> Result<f64> {
        let d = self.dim();
        if axis < 1 || axis > d {
            return Err(Error::Contract(format!("axis {axis} out of range 1..={d}")));
        }
        if level_k < 1 {
            return Err(Error::Contract("slab level k must be ≥ 1".into()));
        }
        if level_k > trunc_depth {
            return Err(Error::Contract(format!(
                "slab level {level_k} exceeds truncation depth {trunc_depth}"
            )));
        }
        let cross_bits = level_k * (d - 1);
        if cross_bits > 40 {
            return Err(Error::Contract(format!(
                "slab enumeration of 2^{} cubes is over budget",
                cross_bits + 1
            )));
        }
        let axis0 = axis - 1;
        let half = 1u64 << (level_k - 1);
        let mut total = 0.0;
        // Cubes in enumeration order: slab side first, then cross index.
        for slab_index in [half - 1, half] {
            for cross in 0..(1u64 << cross_bits) {
                let mut indices = vec![0u64; d as usize];
                let mut c = cross;
                for ax in 0..d {
                    if ax == axis0 {
                        indices[ax as usize] = slab_index;
                    } else {
                        indices[ax as usize] = c & ((1u64 << level_k) - 1);
                        c >>= level_k;
                    }
                }
                let cube = DyadicAddress::from_axis_indices(d, level_k, &indices)?;
                total += self.mass(&cube, trunc_depth)?.value();
            }
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::mean_stats;
    use crate::rng::derive_seed;

    fn ln_cascade(seed: u64, sigma2: f64, dim: u32) -> CascadeMeasure {
        CascadeMeasure::new(seed, WeightModel::log_normal(sigma2, dim).unwrap())
    }

    fn unit_cascade(seed: u64, dim: u32) -> CascadeMeasure {
        CascadeMeasure::new(seed, WeightModel::constant_unit(dim).unwrap())
    }

    fn cube(dim: u32, symbols: &[u32]) -> DyadicAddress {
        let mut a = DyadicAddress::root(dim).unwrap();
        for &s in symbols {
            a = a.child(s).unwrap();
        }
        a
    }

    #[test]
    fn node_weight_is_deterministic() {
        let c = ln_cascade(42, 0.5, 2);
        let a = cube(2, &[3, 0, 2]);
        assert_eq!(
            c.node_weight(&a).unwrap().to_bits(),
            c.node_weight(&a).unwrap().to_bits()
        );
        assert_ne!(
            c.node_weight(&a).unwrap(),
            c.with_seed(43).node_weight(&a).unwrap()
        );
    }

    #[test]
    fn neighbour_seeds_give_uncorrelated_weights() {
        // Empirical correlation over 10^4 addresses between seed and seed+1.
        let c0 = ln_cascade(11, 0.5, 2);
        let c1 = ln_cascade(12, 0.5, 2);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..10_000u32 {
            // distinct depth-7 address per i: the base-4 digits of i
            let symbols: Vec<u32> = (0..7).map(|lvl| (i >> (2 * lvl)) & 3).collect();
            let a = cube(2, &symbols);
            xs.push(c0.node_weight(&a).unwrap());
            ys.push(c1.node_weight(&a).unwrap());
        }
        let (mx, my) = (mean_stats(&xs).mean, mean_stats(&ys).mean);
        let mut cov = 0.0;
        let mut vx = 0.0;
        let mut vy = 0.0;
        for i in 0..xs.len() {
            cov += (xs[i] - mx) * (ys[i] - my);
            vx += (xs[i] - mx) * (xs[i] - mx);
            vy += (ys[i] - my) * (ys[i] - my);
        }
        let corr = cov / (vx * vy).sqrt();
        assert!(corr.abs() < 0.05, "corr {corr}");
    }

    #[test]
    fn axis_weight_support_is_two_point() {
        let c = CascadeMeasure::new(5, WeightModel::two_point(0.5, 1.5, 0.5, 2).unwrap());
        let mut a = DyadicAddress::root(2).unwrap();
        for i in 0..200u32 {
            a = if a.depth() >= 10 {
                cube(2, &[i % 4])
            } else {
                a.child(i % 4).unwrap()
            };
            for axis in 0..2 {
                let w = c.axis_weight(&a, axis).unwrap();
                assert!(
                    (w - 0.5).abs() < 1e-12 || (w - 1.5).abs() < 1e-12,
                    "draw {w} outside the two-point support"
                );
            }
        }
        // d = 1: the node factor is itself a single draw.
        let c1 = CascadeMeasure::new(5, WeightModel::two_point(0.5, 1.5, 0.5, 1).unwrap());
        let b = cube(1, &[1, 0, 1]);
        let w = c1.node_weight(&b).unwrap();
        assert!((w - 0.5).abs() < 1e-12 || (w - 1.5).abs() < 1e-12);
    }

    #[test]
    fn root_carries_no_weight() {
        let c = ln_cascade(1, 0.5, 2);
        let root = DyadicAddress::root(2).unwrap();
        assert!(c.node_weight(&root).is_err());
        assert!(c.axis_weight(&root, 0).is_err());
    }

    #[test]
    fn degenerate_cascade_is_lebesgue() {
        let c = unit_cascade(9, 2);
        for (a, n) in [
            (DyadicAddress::root(2).unwrap(), 5),
            (cube(2, &[1, 2]), 6),
            (cube(2, &[3]), 3),
        ] {
            let m = c.mass(&a, n).unwrap();
            assert!(
                (m.log2_mass - a.log2_lebesgue()).abs() < 1e-12,
                "{} at n={n}: {}",
                a,
                m.log2_mass
            );
        }
        // the 8-ary tree behaves the same way
        let c3 = unit_cascade(9, 3);
        let a = cube(3, &[7, 0]);
        let m = c3.mass(&a, 4).unwrap();
        assert!((m.log2_mass - a.log2_lebesgue()).abs() < 1e-12);
        assert!((c3.total_mass(3).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn d3_total_mass_is_a_mean_one_martingale() {
        let model = WeightModel::log_normal(0.5, 3).unwrap();
        let vals: Vec<f64> = (0..500)
            .map(|i| {
                CascadeMeasure::new(derive_seed(90, i), model)
                    .total_mass(4)
                    .unwrap()
            })
            .collect();
        let st = mean_stats(&vals);
        assert!((st.mean - 1.0).abs() < 3.0 * st.std_error, "{st:?}");
    }

    #[test]
    fn depth_equals_truncation_is_the_plain_chain_product() {
        // d=1 depth-2 cube at n=2: exactly 2^{-2}·W(parent)·W(self).
        let c = ln_cascade(77, 0.5, 1);
        let a = cube(1, &[1, 0]);
        let expected =
            0.25 * c.node_weight(&a.ancestor(1).unwrap()).unwrap() * c.node_weight(&a).unwrap();
        let got = c.mass(&a, 2).unwrap().value();
        assert!((got - expected).abs() < 1e-14 * expected);
    }

    #[test]
    fn martingale_mean_of_child_mass() {
        // E[μ_n(child)] = lebesgue(child) = 2^{-d}, Monte Carlo over seeds.
        let child = cube(1, &[0]);
        let vals: Vec<f64> = (0..2000)
            .map(|i| {
                ln_cascade(derive_seed(100, i), 0.5, 1)
                    .mass(&child, 6)
                    .unwrap()
                    .value()
            })
            .collect();
        let st = mean_stats(&vals);
        assert!(
            (st.mean - 0.5).abs() < 3.0 * st.std_error,
            "mean {} ± {}",
            st.mean,
            st.std_error
        );
    }

    #[test]
    fn martingale_mean_is_depth_free() {
        // E[μ_n(a)] is the same at two truncation depths (both ≈ lebesgue).
        let a = cube(1, &[1]);
        let at = |n: u32| -> Vec<f64> {
            (0..1500)
                .map(|i| {
                    ln_cascade(derive_seed(55, i), 0.5, 1)
                        .mass(&a, n)
                        .unwrap()
                        .value()
                })
                .collect()
        };
        let (s4, s8) = (mean_stats(&at(4)), mean_stats(&at(8)));
        assert!((s4.mean - 0.5).abs() < 3.0 * s4.std_error);
        assert!((s8.mean - 0.5).abs() < 3.0 * s8.std_error);
    }

    #[test]
    fn total_mass_mean_one() {
        let vals: Vec<f64> = (0..2000)
            .map(|i| ln_cascade(derive_seed(3, i), 0.5, 1).total_mass(8).unwrap())
            .collect();
        let st = mean_stats(&vals);
        assert!((st.mean - 1.0).abs() < 3.0 * st.std_error, "{st:?}");
        assert!(vals.iter().all(|&v| v > 0.0));
        // n = 0: empty product.
        assert_eq!(ln_cascade(1, 0.5, 1).total_mass(0).unwrap(), 1.0);
    }

    /// Independent oracle: E[ℓ_n²] by the fixed-point recursion. One level
    /// of the 2^d-ary tree with per-node factor V (E[V] = 1, E[V²] = v2):
    ///   ℓ_n = 2^{−d} Σ_i V_i ℓ_{n−1,i}
    ///   E[ℓ_n²] = 2^{−d}·v2·E[ℓ_{n−1}²] + (1 − 2^{−d}),
    /// whose fixed point is (1 − 2^{−d}) / (1 − 2^{−d}·v2).
    fn second_moment_oracle(dim: u32, v2: f64, n: u32) -> f64 {
        let q = 0.5f64.powi(dim as i32);
        let mut m = 1.0;
        for _ in 0..n {
            m = q * v2 * m + (1.0 - q);
        }
        m
    }

    #[test]
    fn total_mass_second_moment_matches_recursion() {
        // TwoPoint(0.5,1.5,0.5): E[W²] = 1.25; d=1 fixed point is 4/3.
        let model = WeightModel::two_point(0.5, 1.5, 0.5, 1).unwrap();
        let v2 = model.moment(2.0);
        assert!((second_moment_oracle(1, v2, 60) - 4.0 / 3.0).abs() < 1e-12);
        let oracle = second_moment_oracle(1, v2, 8);
        let vals: Vec<f64> = (0..3000)
            .map(|i| {
                let c = CascadeMeasure::new(derive_seed(8, i), model);
                let l = c.total_mass(8).unwrap();
                l * l
            })
            .collect();
        let st = mean_stats(&vals);
        assert!(
            (st.mean - oracle).abs() < 3.0 * st.std_error,
            "mean {} vs oracle {oracle} (se {})",
            st.mean,
            st.std_error
        );
    }

    #[test]
    fn additivity_over_children_is_exact() {
        let c = ln_cascade(21, 0.5, 2);
        let parent = cube(2, &[1]);
        let total = c.mass(&parent, 6).unwrap().value();
        let sum: f64 = parent
            .children()
            .unwrap()
            .iter()
            .map(|k| c.mass(k, 6).unwrap().value())
            .sum();
        assert!(
            ((sum - total) / total).abs() < 1e-10,
            "sum {sum} vs total {total}"
        );
    }

    #[test]
    fn moment_scaling_of_leaf_mass() {
        // For a cube at its own truncation depth, E[μ^s] = (2^{−nd})^{φ(s)}.
        let model = WeightModel::log_normal(0.5, 2).unwrap();
        let a = cube(2, &[1, 2, 0]);
        let n = 3;
        for s in [0.25, 0.5, 0.75] {
            let vals: Vec<f64> = (0..4000)
                .map(|i| {
                    CascadeMeasure::new(derive_seed(40, i), model)
                        .mass(&a, n)
                        .unwrap()
                        .value()
                        .powf(s)
                })
                .collect();
            let st = mean_stats(&vals);
            let expected = ((-(n as f64) * 2.0) * model.phi(s)).exp2();
            assert!(
                (st.mean - expected).abs() < 3.0 * st.std_error,
                "s={s}: {} vs {expected} (se {})",
                st.mean,
                st.std_error
            );
        }
    }

    #[test]
    fn jensen_bound_on_total_mass_moments() {
        for s in [0.25, 0.5, 0.75] {
            let vals: Vec<f64> = (0..1500)
                .map(|i| {
                    ln_cascade(derive_seed(60, i), 0.5, 1)
                        .total_mass(8)
                        .unwrap()
                        .powf(s)
                })
                .collect();
            let st = mean_stats(&vals);
            assert!(
                st.mean <= 1.0 + 3.0 * st.std_error,
                "s={s}: mean {} ± {}",
                st.mean,
                st.std_error
            );
        }
    }

    #[test]
    fn extended_tail_matches_deeper_truncation() {
        let c = ln_cascade(31, 0.5, 1);
        let a = cube(1, &[0, 1]);
        let ext = c.mass_with_tail(&a, 5, TailRule::Extended(3)).unwrap();
        let deep = c.mass(&a, 8).unwrap();
        assert!((ext.log2_mass - deep.log2_mass).abs() < 1e-12);
        assert_eq!(ext.trunc_depth, 5);
        let zero = c.mass_with_tail(&a, 5, TailRule::Extended(0)).unwrap();
        assert_eq!(zero.log2_mass, c.mass(&a, 5).unwrap().log2_mass);
    }

    #[test]
    fn slab_mass_lebesgue_cases() {
        // W ≡ 1: the slab has Lebesgue mass 2·2^{−k} regardless of n.
        let c = unit_cascade(17, 2);
        let m = c.slab_mass(1, 3, 5).unwrap();
        assert!((m - 0.25).abs() < 1e-10, "k=3: {m}");
        let m = c.slab_mass(2, 5, 5).unwrap();
        assert!((m - 2f64.powi(-4)).abs() < 1e-10, "k=n: {m}");
        let m = unit_cascade(17, 1).slab_mass(1, 2, 4).unwrap();
        assert!((m - 0.5).abs() < 1e-10);
    }

    #[test]
    fn slab_mass_mean_decreases_in_k() {
        // E[slab(k)] halves with k; 120 common seeds keep the ordering stable.
        let model = WeightModel::log_normal(0.5, 2).unwrap();
        let mut means = Vec::new();
        for k in 1..=4 {
            let vals: Vec<f64> = (0..120)
                .map(|i| {
                    CascadeMeasure::new(derive_seed(70, i), model)
                        .slab_mass(1, k, 6)
                        .unwrap()
                })
                .collect();
            means.push(mean_stats(&vals).mean);
        }
        for w in means.windows(2) {
            assert!(w[1] < w[0], "slab means not decreasing: {means:?}");
        }
    }

    #[test]
    fn contract_violations() {
        let c = ln_cascade(1, 0.5, 2);
        let a = cube(2, &[0, 1, 2]);
        assert!(c.mass(&a, 2).is_err()); // n < depth
        assert!(c.slab_mass(0, 2, 5).is_err()); // axis out of range
        assert!(c.slab_mass(3, 2, 5).is_err());
        assert!(c.slab_mass(1, 6, 5).is_err()); // k > n
        assert!(c.slab_mass(1, 0, 5).is_err()); // k < 1
        let wrong_dim = cube(1, &[0]);
        assert!(c.mass(&wrong_dim, 4).is_err());
    }

    #[test]
    fn golden_weights_pin_hash_version() {
        // Frozen v1 draws; a change here breaks every stored provenance.
        let c = ln_cascade(42, 0.5, 2);
        let w = c.node_weight(&cube(2, &[3, 0])).unwrap();
        assert_eq!(w.to_bits(), 0x3fea_3472_af58_11ca);
        let tp = CascadeMeasure::new(42, WeightModel::two_point(0.5, 1.5, 0.5, 1).unwrap());
        let w = tp.node_weight(&cube(1, &[1])).unwrap();
        assert_eq!(w.to_bits(), 0x3fe0_0000_0000_0000);
    }
}
