//! s-energies under the dyadic-ball distance, and the empirical Frostman
//! dichotomy.
//!
//! The s-energy of a point cloud sampled from a measure ν is
//!
//!   I_s = (1/N²) Σ_{i≠j} μ(B(x_i, x_j))^{−s},
//!
//! where B is the smallest dyadic cube containing both points, capped at a
//! maximum depth so coincident pairs stay finite. Finiteness of the true
//! energy is not decidable at any truncation, so the profile over growing
//! depth caps is classified by its growth ratios instead: ratios settling
//! to 1 read as bounded energy, ratios settling above 1 as divergence.
//! For a self-similar set the crossover sits at the set's dimension, which
//! is the computable face of the Frostman lower-bound machinery.

use rayon::prelude::*;
use serde::Serialize;

use crate::dimension::MeasureOracle;
use crate::dyadic::{address_of, DyadicAddress, Point, MAX_DEPTH};
use crate::error::{Error, Result};
use crate::numerics::{log2_add, mean_stats};
use crate::rng::{derive_seed, indexed_uniform};
use crate::sets::{CubeClass, SetOracle};

/// Growth classification threshold: final ratio within 1 ± ε is bounded.
pub const GROWTH_EPS: f64 = 0.05;

/// One s-energy evaluation; `profile` is filled by the growth scan.
#[derive(Clone, Debug, Serialize)]
pub struct EnergyEstimate {
    pub s: f64,
    pub value: f64,
    /// Ordered pairs excluding the diagonal: N² − N.
    pub pair_count: u64,
    pub max_depth: u32,
    /// (truncation depth, mean energy) per scanned depth.
    pub profile: Vec<(u32, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GrowthClass {
    Bounded,
    Diverging,
}

/// Energy-growth scan over truncation depths.
#[derive(Clone, Debug, Serialize)]
pub struct EnergyProfile {
    pub estimate: EnergyEstimate,
    pub depths: Vec<u32>,
    /// Per-seed energies indexed \[seed\]\[depth\].
    pub per_seed: Vec<Vec<f64>>,
    /// Consecutive mean-profile ratios.
    pub ratios: Vec<f64>,
    pub growth: GrowthClass,
    pub seeds: u32,
    pub points: usize,
}

/// N points from the natural self-similar measure of a set: descend the
/// tree choosing uniformly among non-disjoint children, take cube centers.
///
/// Supported for sets with a canonical uniform tree measure (full cube,
/// dyadic Cantor, singleton).
pub fn sample_natural_measure(
    set: &SetOracle,
    depth: u32,
    count: usize,
    rng_seed: u64,
) -> Result<Vec<Point>> {
    match set.kind_name() {
        "fullcube" | "cantor" | "singleton" => {}
        other => {
            return Err(Error::UnsupportedSet { kind: other.into() });
        }
    }
    if !(1..=MAX_DEPTH).contains(&depth) {
        return Err(Error::DepthOutOfRange {
            depth,
            max: MAX_DEPTH,
        });
    }
    let root = DyadicAddress::root(set.dim())?;
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut cube = root;
        for level in 0..depth {
            let mut open: Vec<DyadicAddress> = Vec::with_capacity(cube.arity() as usize);
            for child in cube.children()? {
                if set.classify(&child)? != CubeClass::Disjoint {
                    open.push(child);
                }
            }
            debug_assert!(!open.is_empty(), "non-disjoint cube with no open children");
            let u = indexed_uniform(rng_seed, i as u64, level as u64);
            let pick = ((u * open.len() as f64) as usize).min(open.len() - 1);
            cube = open[pick];
        }
        out.push(Point::new(cube.center())?);
    }
    Ok(out)
}

/// The pairwise s-energy of a point list under a measure oracle.
///
/// Each pair's term is computed in log2 space; row partial sums fold in a
/// fixed order so the value is thread-count independent.
pub fn s_energy(
    oracle: &MeasureOracle,
    points: &[Point],
    s: f64,
    max_depth: u32,
) -> Result<EnergyEstimate> {
    if points.len() < 2 {
        return Err(Error::Contract("s_energy needs at least 2 points".into()));
    }
    if !s.is_finite() || s < 0.0 {
        return Err(Error::Contract(format!(
            "s must be finite and ≥ 0, got {s}"
        )));
    }
    if max_depth > MAX_DEPTH {
        return Err(Error::DepthOutOfRange {
            depth: max_depth,
            max: MAX_DEPTH,
        });
    }
    let n = points.len();
    // Per-point ancestor chains: address at the cap and log2 μ per depth.
    // Both endpoints of a pair share the ball, so one table serves.
    let prepared: Vec<(DyadicAddress, Vec<f64>)> = points
        .iter()
        .map(|p| {
            let addr = address_of(p, max_depth)?;
            let masses: Vec<f64> = (0..=max_depth)
                .map(|m| oracle.log2_mass(&addr.ancestor(m)?))
                .collect::<Result<Vec<f64>>>()?;
            Ok((addr, masses))
        })
        .collect::<Result<Vec<_>>>()?;

    // Unordered pairs by row, rows folded in index order.
    let row_sums: Vec<f64> = (0..n - 1)
        .into_par_iter()
        .map(|i| {
            let (ref ai, ref mi) = prepared[i];
            let mut acc = f64::NEG_INFINITY;
            for (aj, _) in prepared.iter().skip(i + 1) {
                let ball_depth = ai.common_prefix_depth(aj);
                acc = log2_add(acc, -s * mi[ball_depth as usize]);
            }
            acc
        })
        .collect();
    let mut log2_sum = f64::NEG_INFINITY;
    for r in row_sums {
        log2_sum = log2_add(log2_sum, r);
    }
    // Σ_{i≠j} = 2 Σ_{i<j}; normalize by N².
    let log2_value = log2_sum + 1.0 - 2.0 * (n as f64).log2();
    Ok(EnergyEstimate {
        s,
        value: log2_value.exp2(),
        pair_count: (n as u64) * (n as u64 - 1),
        max_depth,
        profile: Vec::new(),
    })
}

/// Mean s-energy across fresh samples at each truncation depth, with the
/// growth classification of the resulting profile.
pub fn energy_growth_profile(
    oracle: &MeasureOracle,
    set: &SetOracle,
    s: f64,
    depths: &[u32],
    points: usize,
    seeds: u32,
    master_seed: u64,
) -> Result<EnergyProfile> {
    if depths.len() < 2 {
        return Err(Error::Contract(
            "growth profile needs at least 2 depths".into(),
        ));
    }
    if depths.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Contract(
            "profile depths must be strictly increasing".into(),
        ));
    }
    if seeds == 0 {
        return Err(Error::Contract("growth profile needs seeds ≥ 1".into()));
    }
    let per_seed: Vec<Vec<f64>> = (0..seeds)
        .into_par_iter()
        .map(|k| {
            let seed = derive_seed(master_seed, k as u64);
            depths
                .iter()
                .map(|&m| {
                    let pts = sample_natural_measure(set, m, points, derive_seed(seed, m as u64))?;
                    Ok(s_energy(oracle, &pts, s, m)?.value)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mean_profile: Vec<f64> = (0..depths.len())
        .map(|di| mean_stats(&per_seed.iter().map(|row| row[di]).collect::<Vec<f64>>()).mean)
        .collect();
    let ratios: Vec<f64> = mean_profile.windows(2).map(|w| w[1] / w[0]).collect();
    let growth = if *ratios.last().expect("≥ 2 depths") < 1.0 + GROWTH_EPS {
        GrowthClass::Bounded
    } else {
        GrowthClass::Diverging
    };
    Ok(EnergyProfile {
        estimate: EnergyEstimate {
            s,
            value: *mean_profile.last().expect("non-empty"),
            pair_count: (points as u64) * (points as u64 - 1),
            max_depth: *depths.last().expect("non-empty"),
            profile: depths.iter().cloned().zip(mean_profile).collect(),
        },
        depths: depths.to_vec(),
        per_seed,
        ratios,
        growth,
        seeds,
        points,
    })
}
