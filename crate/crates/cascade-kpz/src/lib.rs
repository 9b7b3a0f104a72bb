//! Multiplicative-cascade random measures on the dyadic subdivision of
//! [0,1)^d, with the estimation toolkit around them: measure-relative
//! Hausdorff dimension from partition-function scaling, dyadic-ball
//! s-energies with the Frostman growth dichotomy, and end-to-end numerical
//! verification of the KPZ dimension relation 2^{ζ₀} = 2^ζ / E[W^ζ].
//!
//! Everything is deterministic: weights are a pure counter-hash function of
//! (seed, tree address, axis), so runs replay bit-identically at any thread
//! count and no tree is ever held in memory.
//!
//! ## Runnable examples
//!
//! One example per capability, under `examples/`:
//!
//! ```bash
//! cargo run --release --example validate_weights
//! cargo run --release --example total_mass_moments
//! cargo run --release --example dimension_estimates
//! cargo run --release --example mass_bound
//! cargo run --release --example energy_dichotomy
//! cargo run --release --example kpz_cantor
//! cargo run --release --example deterministic_replay
//! ```
//!
//! The same pipelines are scriptable through the thin `cascade-kpz` binary
//! (`validate`, `mass-stats`, `dimension`, `energy`, `kpz`, `bound-check`,
//! `replay` subcommands); see the crate README.

pub mod cascade;
pub mod config;
pub mod dimension;
pub mod dyadic;
pub mod energy;
mod error;
pub mod kpz;
pub mod numerics;
pub mod rng;
pub mod runner;
pub mod sets;
pub mod weights;

pub use cascade::{CascadeMeasure, MassEstimate, TailRule};
pub use config::{Command, ExperimentConfig};
pub use dimension::{
    estimate_dimension, partition_sum, partition_table, scaling_slope, DimensionEstimate,
    EstimateParams, MeasureOracle, PartitionSumTable,
};
pub use dyadic::{address_of, dyadic_ball, DyadicAddress, Point};
pub use energy::{energy_growth_profile, s_energy, sample_natural_measure, EnergyEstimate};
pub use error::{Error, Result};
pub use kpz::{kpz_experiment, phi, phi_inverse, verify_mass_bound, KpzReport, MassBoundCheck};
pub use sets::{CubeClass, SetOracle};
pub use weights::{ValidityReport, WeightModel};

/// Tool version recorded in provenance files; replay refuses to cross it.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
