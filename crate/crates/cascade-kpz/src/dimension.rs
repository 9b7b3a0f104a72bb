//! Measure-relative dimension from partition-function scaling.
//!
//! For a measure μ, a set E and a depth n, the partition function is
//!
//!   Z_n(s) = Σ μ(A)^s over the depth-n cubes A meeting E,
//!
//! computed exactly over the canonical uniform-depth cover by pruned
//! enumeration (disjoint subtrees are never entered). The normalized slope
//! λ(s) of log2 Z_n against n, divided by d, decides whether the s-content
//! diverges (λ > 0) or vanishes (λ < 0); the dimension estimate ζ̂ is the
//! unique zero crossing. Truncating the cascade tail multiplies Z_n(s) by a
//! depth-independent factor, which shifts intercepts only — reading the
//! slope, never the intercept, is what makes the estimator truncation-proof.
//!
//! Reductions follow a fixed split-and-fold structure, so results are
//! bit-identical at any thread count.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::cascade::{CascadeMeasure, TailRule};
use crate::dyadic::{DyadicAddress, MAX_DEPTH};
use crate::error::{Error, Result};
use crate::numerics::{least_squares_slope, log2_add, mean_stats};
use crate::rng::{derive_seed, NodeState};
use crate::sets::{CubeClass, SetOracle};

/// Default cap on enumerated tree nodes per partition evaluation.
pub const DEFAULT_NODE_BUDGET: u64 = 1 << 26;
/// |λ| below this is an exact zero of the slope function.
const EXACT_ZERO_TOL: f64 = 1e-12;
/// For custom grids stopping short of [0,1], endpoint slopes within this
/// of zero still clamp ζ̂ to the endpoint (statistical-noise allowance).
const BOUNDARY_CLAMP_TOL: f64 = 0.05;

/// A queryable log2-mass source: Lebesgue, or a seeded cascade with a
/// fixed truncation tail rule.
#[derive(Clone, Debug)]
pub enum MeasureOracle {
    Lebesgue {
        dim: u32,
    },
    Cascade {
        measure: CascadeMeasure,
        tail: TailRule,
    },
}

impl MeasureOracle {
    pub fn lebesgue(dim: u32) -> Self {
        MeasureOracle::Lebesgue { dim }
    }

    pub fn cascade(measure: CascadeMeasure, tail: TailRule) -> Self {
        MeasureOracle::Cascade { measure, tail }
    }

    pub fn dim(&self) -> u32 {
        match self {
            MeasureOracle::Lebesgue { dim } => *dim,
            MeasureOracle::Cascade { measure, .. } => measure.dim(),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            MeasureOracle::Lebesgue { .. } => None,
            MeasureOracle::Cascade { measure, .. } => Some(measure.seed()),
        }
    }

    /// Reseeded copy (identity for Lebesgue).
    pub fn with_seed(&self, seed: u64) -> Self {
        match self {
            MeasureOracle::Lebesgue { dim } => MeasureOracle::Lebesgue { dim: *dim },
            MeasureOracle::Cascade { measure, tail } => MeasureOracle::Cascade {
                measure: measure.with_seed(seed),
                tail: *tail,
            },
        }
    }

    /// Measure identifier for reports (seeds are reported separately).
    pub fn id(&self) -> String {
        match self {
            MeasureOracle::Lebesgue { .. } => "lebesgue".into(),
            MeasureOracle::Cascade { measure, tail } => format!(
                "cascade({},tail={})",
                measure.model().spec_string(),
                tail.spec_string()
            ),
        }
    }

    /// log2 μ(a) at the cube's own depth under the oracle's tail rule.
    pub fn log2_mass(&self, a: &DyadicAddress) -> Result<f64> {
        match self {
            MeasureOracle::Lebesgue { dim } => {
                if a.dim() != *dim {
                    return Err(Error::DimensionMismatch {
                        expected: *dim,
                        found: a.dim(),
                    });
                }
                Ok(a.log2_lebesgue())
            }
            MeasureOracle::Cascade { measure, tail } => {
                Ok(measure.mass_with_tail(a, a.depth(), *tail)?.log2_mass)
            }
        }
    }
}

/// Tabulated log2 Z_n(s) over a depth range and an s grid.
#[derive(Clone, Debug)]
pub struct PartitionSumTable {
    pub set: String,
    pub measure: String,
    pub seed: Option<u64>,
    pub dim: u32,
    pub depths: Vec<u32>,
    pub s_values: Vec<f64>,
    /// log2 Z indexed \[depth\]\[s\].
    pub log2_z: Vec<Vec<f64>>,
}

impl PartitionSumTable {
    pub fn log2_z_at(&self, n: u32, s: f64) -> Option<f64> {
        let di = self.depths.iter().position(|&m| m == n)?;
        let sj = self.s_values.iter().position(|&v| (v - s).abs() <= 1e-12)?;
        Some(self.log2_z[di][sj])
    }

    /// Flat (n, s, log2_Z) rows in depth-major order, for CSV export.
    pub fn rows(&self) -> impl Iterator<Item = (u32, f64, f64)> + '_ {
        self.depths.iter().enumerate().flat_map(move |(di, &n)| {
            self.s_values
                .iter()
                .enumerate()
                .map(move |(sj, &s)| (n, s, self.log2_z[di][sj]))
        })
    }
}

/// Node snapshot carried through the enumeration.
#[derive(Clone)]
struct Frame {
    addr: DyadicAddress,
    state: Option<NodeState>,
    cum_log2_weight: f64,
    contained: bool,
}

struct WalkCtx<'a> {
    set: &'a SetOracle,
    oracle: &'a MeasureOracle,
    n_min: u32,
    n_max: u32,
    s_values: &'a [f64],
    visited: &'a AtomicU64,
    budget: u64,
}

type Acc = Vec<Vec<f64>>;

/// Per-depth log2 cube masses in visit order, kept by the estimator so
/// refinement evaluations can re-reduce without re-walking (and without
/// re-drawing) the tree. Conservatively skipped for trees whose unpruned
/// size would not fit.
pub(crate) struct MassCache {
    n_min: u32,
    rows: Vec<Vec<f64>>,
}

const CACHE_ELEMENT_LIMIT: u64 = 48 << 20;

impl MassCache {
    fn new(n_min: u32, n_max: u32) -> Self {
        MassCache {
            n_min,
            rows: vec![Vec::new(); (n_max - n_min + 1) as usize],
        }
    }

    fn push(&mut self, depth: u32, log2_mass: f64) {
        self.rows[(depth - self.n_min) as usize].push(log2_mass);
    }

    fn append(&mut self, other: MassCache) {
        for (row, mut orow) in self.rows.iter_mut().zip(other.rows) {
            row.append(&mut orow);
        }
    }

    /// log2 Z_n(s) per depth, folded in the cached visit order (the same
    /// order the direct traversal uses).
    fn log2_z_column(&self, s: f64) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| {
                let mut acc = f64::NEG_INFINITY;
                for &lm in row {
                    acc = log2_add(acc, s * lm);
                }
                acc
            })
            .collect()
    }

    fn slope(&self, s: f64, dim: u32) -> Result<f64> {
        let col = self.log2_z_column(s);
        if col.len() < 3 {
            return Err(Error::InsufficientDepths {
                have: col.len(),
                need: 3,
            });
        }
        let pts: Vec<(f64, f64)> = col
            .iter()
            .enumerate()
            .map(|(i, &z)| ((self.n_min + i as u32) as f64, z))
            .collect();
        Ok(least_squares_slope(&pts) / dim as f64)
    }
}

impl<'a> WalkCtx<'a> {
    fn new_acc(&self) -> Acc {
        vec![vec![f64::NEG_INFINITY; self.s_values.len()]; (self.n_max - self.n_min + 1) as usize]
    }

    fn charge_visit(&self) -> Result<()> {
        let seen = self.visited.fetch_add(1, Ordering::Relaxed) + 1;
        if seen > self.budget {
            return Err(Error::NodeBudgetExceeded {
                set: self.set.spec_string(),
                depth: self.n_max,
                visited: seen,
                budget: self.budget,
            });
        }
        Ok(())
    }

    /// log2 μ(node) for a node on the pruned tree.
    fn log2_mass(&self, frame: &Frame) -> f64 {
        match self.oracle {
            MeasureOracle::Lebesgue { dim } => -((frame.addr.depth() * dim) as f64),
            MeasureOracle::Cascade { measure, tail } => {
                let depth = frame.addr.depth();
                let target = depth + tail.extra_depth();
                let sub = match tail.extra_depth() {
                    0 => 0.0,
                    _ => measure.subtree_log2_sum(
                        frame.state.expect("cascade frames carry state"),
                        depth,
                        target,
                    ),
                };
                -((target * measure.dim()) as f64) + frame.cum_log2_weight + sub
            }
        }
    }

    fn contribute(&self, frame: &Frame, acc: &mut Acc, cache: &mut Option<MassCache>) {
        let depth = frame.addr.depth();
        if depth < self.n_min {
            return;
        }
        let lm = self.log2_mass(frame);
        if let Some(c) = cache {
            c.push(depth, lm);
        }
        let row = &mut acc[(depth - self.n_min) as usize];
        for (j, &s) in self.s_values.iter().enumerate() {
            row[j] = log2_add(row[j], s * lm);
        }
    }

    /// Expand one node into its non-disjoint children, in symbol order.
    fn expand(&self, frame: &Frame) -> Result<Vec<Frame>> {
        let mut out = Vec::with_capacity(frame.addr.arity() as usize);
        for sym in 0..frame.addr.arity() {
            let child = frame.addr.child(sym)?;
            let contained = if frame.contained {
                true
            } else {
                match self.set.classify(&child)? {
                    CubeClass::Disjoint => continue,
                    CubeClass::Intersects => false,
                    CubeClass::Contained => true,
                }
            };
            let (state, cum) = match self.oracle {
                MeasureOracle::Lebesgue { .. } => (None, 0.0),
                MeasureOracle::Cascade { measure, .. } => {
                    let st = frame.state.expect("cascade frames carry state").child(sym);
                    (
                        Some(st),
                        frame.cum_log2_weight + measure.log2_node_factor_at(st),
                    )
                }
            };
            out.push(Frame {
                addr: child,
                state,
                cum_log2_weight: cum,
                contained,
            });
        }
        Ok(out)
    }

    /// Depth-first accumulation below a frame (the frame itself included).
    fn walk(&self, frame: &Frame, acc: &mut Acc, cache: &mut Option<MassCache>) -> Result<()> {
        self.charge_visit()?;
        self.contribute(frame, acc, cache);
        if frame.addr.depth() < self.n_max {
            for child in self.expand(frame)? {
                self.walk(&child, acc, cache)?;
            }
        }
        Ok(())
    }
}

fn root_frame(oracle: &MeasureOracle, set: &SetOracle) -> Result<Frame> {
    let root = DyadicAddress::root(oracle.dim())?;
    let contained = set.classify(&root)? == CubeClass::Contained;
    let state = match oracle {
        MeasureOracle::Lebesgue { .. } => None,
        MeasureOracle::Cascade { measure, .. } => Some(measure.root_state()),
    };
    Ok(Frame {
        addr: root,
        state,
        cum_log2_weight: 0.0,
        contained,
    })
}

/// Exact log-domain partition sums over a depth range and s grid, one pruned
/// enumeration for the whole table.
///
/// The tree splits into fixed-depth blocks walked independently (rayon) and
/// folded in block order, so the reduction tree — and hence every bit of the
/// output — is independent of the thread budget.
pub fn partition_table(
    oracle: &MeasureOracle,
    set: &SetOracle,
    n_min: u32,
    n_max: u32,
    s_values: &[f64],
    node_budget: u64,
) -> Result<PartitionSumTable> {
    Ok(partition_table_with_cache(oracle, set, n_min, n_max, s_values, node_budget, false)?.0)
}

pub(crate) fn partition_table_with_cache(
    oracle: &MeasureOracle,
    set: &SetOracle,
    n_min: u32,
    n_max: u32,
    s_values: &[f64],
    node_budget: u64,
    want_cache: bool,
) -> Result<(PartitionSumTable, Option<MassCache>)> {
    if set.dim() != oracle.dim() {
        return Err(Error::DimensionMismatch {
            expected: oracle.dim(),
            found: set.dim(),
        });
    }
    if n_min < 1 || n_min > n_max || n_max > MAX_DEPTH {
        return Err(Error::Contract(format!(
            "bad depth range {n_min}..{n_max} (need 1 ≤ n_min ≤ n_max ≤ {MAX_DEPTH})"
        )));
    }
    if s_values.is_empty() || s_values.iter().any(|&s| !s.is_finite() || s < 0.0) {
        return Err(Error::Contract(
            "s grid must be non-empty with finite s ≥ 0".into(),
        ));
    }

    let visited = AtomicU64::new(0);
    let ctx = WalkCtx {
        set,
        oracle,
        n_min,
        n_max,
        s_values,
        visited: &visited,
        budget: node_budget,
    };

    // Cache masses only when even the unpruned tree would fit.
    let unpruned: u64 = (0..=n_max.min(62 / oracle.dim()) as u64)
        .map(|j| 1u64 << (j as u32 * oracle.dim()).min(62))
        .sum();
    let cache_on = want_cache && unpruned <= CACHE_ELEMENT_LIMIT;

    // Crown: depth-first in symbol order down to the split depth, own
    // contributions included; children at the split depth become blocks.
    let split = (8 / oracle.dim()).clamp(2, 8).min(n_max);
    let mut acc = ctx.new_acc();
    let mut cache = cache_on.then(|| MassCache::new(n_min, n_max));
    let mut frontier: Vec<Frame> = Vec::new();
    let mut queue = vec![root_frame(oracle, set)?];
    while let Some(frame) = queue.pop() {
        ctx.charge_visit()?;
        ctx.contribute(&frame, &mut acc, &mut cache);
        if frame.addr.depth() >= n_max {
            continue;
        }
        let children = ctx.expand(&frame)?;
        if frame.addr.depth() + 1 == split {
            frontier.extend(children);
        } else {
            // LIFO queue: push reversed to keep symbol order
            queue.extend(children.into_iter().rev());
        }
    }

    // Blocks in parallel, folded in frontier order.
    let blocks: Vec<(Acc, Option<MassCache>)> = frontier
        .par_iter()
        .map(|frame| {
            let mut block = ctx.new_acc();
            let mut bcache = cache_on.then(|| MassCache::new(n_min, n_max));
            ctx.walk(frame, &mut block, &mut bcache)?;
            Ok((block, bcache))
        })
        .collect::<Result<Vec<(Acc, Option<MassCache>)>>>()?;
    for (block, bcache) in blocks {
        for (row, brow) in acc.iter_mut().zip(block) {
            for (cell, b) in row.iter_mut().zip(brow) {
                *cell = log2_add(*cell, b);
            }
        }
        if let (Some(c), Some(bc)) = (&mut cache, bcache) {
            c.append(bc);
        }
    }

    Ok((
        PartitionSumTable {
            set: set.spec_string(),
            measure: oracle.id(),
            seed: oracle.seed(),
            dim: oracle.dim(),
            depths: (n_min..=n_max).collect(),
            s_values: s_values.to_vec(),
            log2_z: acc,
        },
        cache,
    ))
}

/// log2 Z_n(s) for one depth and one exponent.
pub fn partition_sum(
    oracle: &MeasureOracle,
    set: &SetOracle,
    n: u32,
    s: f64,
    node_budget: u64,
) -> Result<f64> {
    let table = partition_table(oracle, set, n, n, &[s], node_budget)?;
    Ok(table.log2_z[0][0])
}

/// Least-squares slope of log2 Z_n(s) against n over a depth range,
/// normalized by d so Lebesgue on the full cube gives λ(s) = 1 − s.
pub fn scaling_slope(table: &PartitionSumTable, s: f64, n_range: (u32, u32)) -> Result<f64> {
    let sj = table
        .s_values
        .iter()
        .position(|&v| (v - s).abs() <= 1e-12)
        .ok_or_else(|| Error::Contract(format!("s = {s} is not tabulated")))?;
    let pts: Vec<(f64, f64)> = table
        .depths
        .iter()
        .enumerate()
        .filter(|(_, &n)| n >= n_range.0 && n <= n_range.1)
        .map(|(di, &n)| (n as f64, table.log2_z[di][sj]))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientDepths {
            have: pts.len(),
            need: 3,
        });
    }
    Ok(least_squares_slope(&pts) / table.dim as f64)
}

/// Estimator configuration.
#[derive(Clone, Debug)]
pub struct EstimateParams {
    pub n_min: u32,
    pub n_max: u32,
    pub s_grid: Vec<f64>,
    pub seeds: u32,
    pub node_budget: u64,
    pub bisect_tol: f64,
}

impl EstimateParams {
    pub fn default_s_grid() -> Vec<f64> {
        (0..=20).map(|i| i as f64 * 0.05).collect()
    }
}

impl Default for EstimateParams {
    fn default() -> Self {
        EstimateParams {
            n_min: 4,
            n_max: 12,
            s_grid: Self::default_s_grid(),
            seeds: 20,
            node_budget: DEFAULT_NODE_BUDGET,
            bisect_tol: 1e-4,
        }
    }
}

/// A dimension estimate with its fit diagnostics.
#[derive(Clone, Debug)]
pub struct DimensionEstimate {
    pub zeta_hat: f64,
    pub stderr: f64,
    pub n_min: u32,
    pub n_max: u32,
    pub seeds: u32,
    /// Sampled λ(s) on the grid (seed-averaged for cascades).
    pub slope_fn: Vec<(f64, f64)>,
    /// Per-seed ζ̂ (length 1 for Lebesgue).
    pub per_seed: Vec<f64>,
    /// Per-seed grid tables, for export.
    pub tables: Vec<PartitionSumTable>,
}

/// The frozen JSON shape of a dimension estimate.
#[derive(Clone, Debug, Serialize)]
pub struct DimensionRecord {
    pub zeta_hat: f64,
    pub stderr: f64,
    pub n_min: u32,
    pub n_max: u32,
    pub seeds: u32,
}

impl DimensionEstimate {
    pub fn record(&self) -> DimensionRecord {
        DimensionRecord {
            zeta_hat: self.zeta_hat,
            stderr: self.stderr,
            n_min: self.n_min,
            n_max: self.n_max,
            seeds: self.seeds,
        }
    }
}

/// Locate the zero of the (monotone decreasing) slope function: exact grid
/// zeros first, then a sign-change bracket narrowed to the s tolerance by
/// bracketed false-position steps (fresh slope evaluations), finished by
/// linear interpolation between the bracket ends.
/// No crossing at the theoretical boundaries is not an error: the dimension
/// always lies in [0,1], so λ still positive at s = 1 pins ζ̂ = 1 (the
/// full-measure case, where the crossing sits on the boundary and per-seed
/// noise puts λ(1) either side of zero) and λ negative at s = 0 pins ζ̂ = 0.
fn solve_zero_crossing(
    grid: &[(f64, f64)],
    tol: f64,
    mut eval: impl FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    for &(s, l) in grid {
        if l.abs() <= EXACT_ZERO_TOL {
            return Ok(s);
        }
    }
    let bracket = grid
        .windows(2)
        .find(|w| w[0].1 > 0.0 && w[1].1 < 0.0)
        .map(|w| (w[0], w[1]));
    let (mut lo, mut hi) = match bracket {
        Some(b) => b,
        None => {
            let first = grid[0];
            let last = grid[grid.len() - 1];
            if first.1 < 0.0 && (first.0 <= 0.0 || first.1 >= -BOUNDARY_CLAMP_TOL) {
                return Ok(first.0);
            }
            if last.1 > 0.0 && (last.0 >= 1.0 || last.1 <= BOUNDARY_CLAMP_TOL) {
                return Ok(last.0);
            }
            return Err(Error::EstimationFailed {
                diagnostics: format!(
                    "no sign change of λ on the grid: λ({}) = {:.6}, λ({}) = {:.6}; \
                     bad depth range or invalid model",
                    first.0, first.1, last.0, last.1
                ),
            });
        }
    };
    // Bracketed root refinement: false position with the Illinois
    // safeguard (λ is close to affine in s, so this converges in a few
    // evaluations where midpoint bisection would take ~log2(Δs/tol)).
    let mut side = 0i8;
    let mut iterations = 0;
    while hi.0 - lo.0 > tol && iterations < 100 {
        iterations += 1;
        let x = hi.0 - hi.1 * (hi.0 - lo.0) / (hi.1 - lo.1);
        // keep strictly inside the bracket
        let x = x.clamp(
            lo.0 + 1e-3 * tol * (hi.0 - lo.0),
            hi.0 - 1e-3 * tol * (hi.0 - lo.0),
        );
        let lx = eval(x)?;
        if lx.abs() <= EXACT_ZERO_TOL {
            return Ok(x);
        }
        if lx > 0.0 {
            lo = (x, lx);
            if side == 1 {
                hi.1 *= 0.5;
            }
            side = 1;
        } else {
            hi = (x, lx);
            if side == -1 {
                lo.1 *= 0.5;
            }
            side = -1;
        }
    }
    Ok(lo.0 + (hi.0 - lo.0) * lo.1 / (lo.1 - hi.1))
}

fn solve_single(
    oracle: &MeasureOracle,
    set: &SetOracle,
    params: &EstimateParams,
) -> Result<(f64, Vec<f64>, PartitionSumTable)> {
    let (table, cache) = partition_table_with_cache(
        oracle,
        set,
        params.n_min,
        params.n_max,
        &params.s_grid,
        params.node_budget,
        true,
    )?;
    let full_range = (params.n_min, params.n_max);
    let lambdas: Vec<f64> = params
        .s_grid
        .iter()
        .map(|&s| scaling_slope(&table, s, full_range))
        .collect::<Result<Vec<f64>>>()?;
    let grid: Vec<(f64, f64)> = params.s_grid.iter().cloned().zip(lambdas.clone()).collect();
    let zeta = solve_zero_crossing(&grid, params.bisect_tol, |s| match &cache {
        Some(c) => c.slope(s, oracle.dim()),
        None => {
            let t = partition_table(
                oracle,
                set,
                params.n_min,
                params.n_max,
                &[s],
                params.node_budget,
            )?;
            scaling_slope(&t, s, full_range)
        }
    })?;
    Ok((zeta, lambdas, table))
}

/// Estimate the μ-relative dimension ζ of a set.
///
/// Under Lebesgue the estimate is deterministic. Under a cascade the
/// oracle's seed acts as a master seed: `params.seeds` derived seeds give
/// one quenched ζ̂ each, aggregated as mean ± standard error (the spread is
/// the finite-size proxy for almost-sure constancy).
pub fn estimate_dimension(
    oracle: &MeasureOracle,
    set: &SetOracle,
    params: &EstimateParams,
) -> Result<DimensionEstimate> {
    if params.s_grid.len() < 2 {
        return Err(Error::Contract("s grid needs at least 2 points".into()));
    }
    match oracle {
        MeasureOracle::Lebesgue { .. } => {
            let (zeta, lambdas, table) = solve_single(oracle, set, params)?;
            Ok(DimensionEstimate {
                zeta_hat: zeta,
                stderr: 0.0,
                n_min: params.n_min,
                n_max: params.n_max,
                seeds: 1,
                slope_fn: params.s_grid.iter().cloned().zip(lambdas).collect(),
                per_seed: vec![zeta],
                tables: vec![table],
            })
        }
        MeasureOracle::Cascade { measure, .. } => {
            let report = measure.model().validate();
            if !report.all_ok() {
                return Err(Error::InvalidModel {
                    reason: format!(
                        "cascade model fails validation (mean_ok={}, nondegenerate={}, \
                         phi_monotone={}, neg_moments_ok={})",
                        report.mean_ok,
                        report.nondegenerate,
                        report.phi_monotone,
                        report.neg_moments_ok
                    ),
                });
            }
            if params.seeds == 0 {
                return Err(Error::Contract("cascade estimation needs seeds ≥ 1".into()));
            }
            let master = measure.seed();
            let runs: Vec<(f64, Vec<f64>, PartitionSumTable)> = (0..params.seeds)
                .into_par_iter()
                .map(|i| {
                    let seeded = oracle.with_seed(derive_seed(master, i as u64));
                    solve_single(&seeded, set, params)
                })
                .collect::<Result<Vec<_>>>()?;
            let per_seed: Vec<f64> = runs.iter().map(|r| r.0).collect();
            let st = mean_stats(&per_seed);
            let slope_fn: Vec<(f64, f64)> = params
                .s_grid
                .iter()
                .enumerate()
                .map(|(j, &s)| {
                    let mean_l = runs.iter().map(|r| r.1[j]).sum::<f64>() / runs.len() as f64;
                    (s, mean_l)
                })
                .collect();
            Ok(DimensionEstimate {
                zeta_hat: st.mean,
                stderr: st.std_error,
                n_min: params.n_min,
                n_max: params.n_max,
                seeds: params.seeds,
                slope_fn,
                per_seed,
                tables: runs.into_iter().map(|r| r.2).collect(),
            })
        }
    }
}
