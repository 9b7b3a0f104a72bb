//! The structure exponent φ, the KPZ dimension identity in forward and
//! inverse form, the per-ball moment bound, and the end-to-end experiment.
//!
//! For an admissible weight law, φ(s) = s − log2 E[W^s] is an increasing
//! homeomorphism of \[0,1\] onto itself, and the Lebesgue dimension ζ₀ of a
//! set is tied to its cascade dimension ζ by φ(ζ) = ζ₀, equivalently
//! 2^{ζ₀} = 2^ζ / E[W^ζ] — with no dimension d anywhere in the identity.
//! Test sets come with analytic ζ₀, so the inverse direction ζ = φ⁻¹(ζ₀)
//! is the primary map; the cascade side is measured and compared.

use serde::Serialize;

use crate::cascade::{CascadeMeasure, TailRule};
use crate::dimension::{estimate_dimension, DimensionEstimate, EstimateParams, MeasureOracle};
use crate::dyadic::DyadicAddress;
use crate::error::{Error, Result};
use crate::numerics::mean_stats;
use crate::rng::derive_seed;
use crate::sets::SetOracle;
use crate::weights::{ValidityReport, WeightModel};

const PHI_INVERSE_TOL: f64 = 1e-10;

/// The structure exponent φ(s) = s − log2 E[W^s].
#[inline]
pub fn phi(model: &WeightModel, s: f64) -> f64 {
    model.phi(s)
}

/// The unique ζ ∈ \[0,1\] with φ(ζ) = ζ₀, by bisection to 1e−10.
///
/// Requires a φ-monotone model; the endpoints map exactly (0→0, 1→1).
pub fn phi_inverse(model: &WeightModel, zeta0: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&zeta0) {
        return Err(Error::Contract(format!(
            "zeta0 must lie in [0,1], got {zeta0}"
        )));
    }
    if !model.validate().phi_monotone {
        return Err(Error::InvalidModel {
            reason: "phi is not monotone on [0,1]; phi_inverse is ill-posed".into(),
        });
    }
    if zeta0 == 0.0 {
        return Ok(0.0);
    }
    if zeta0 == 1.0 {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > PHI_INVERSE_TOL {
        let mid = 0.5 * (lo + hi);
        if model.phi(mid) < zeta0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The fixed representative cube the bound is checked on: depth-n cubes
/// are exchangeable, so the first one (the all-zeros path) stands in.
pub fn bound_check_cube(dim: u32, depth: u32) -> Result<DyadicAddress> {
    let mut cube = DyadicAddress::root(dim)?;
    for _ in 0..depth {
        cube = cube.child(0)?;
    }
    Ok(cube)
}

/// One exponent's verdict from [`verify_mass_bound`].
#[derive(Clone, Debug, Serialize)]
pub struct MassBoundCheck {
    pub s: f64,
    pub mean: f64,
    pub std_error: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Monte Carlo check of the per-ball moment bound
/// E[μ(B)^s] ≤ |B|^{φ(s)} at a fixed depth-n cube.
///
/// Cubes at equal depth are exchangeable, so one fixed cube (the first at
/// that depth) represents them all. Under the mean-one tail the truncated
/// mean equals the bound exactly, so the check passes with
/// mean ≤ bound·(1 + 3·relative SE) and sits at equality within noise at
/// s ∈ {0, 1}.
pub fn verify_mass_bound(
    measure: &CascadeMeasure,
    depth: u32,
    s_list: &[f64],
    trials: u32,
) -> Result<Vec<MassBoundCheck>> {
    if depth < 1 {
        return Err(Error::Contract("mass bound needs depth ≥ 1".into()));
    }
    if s_list.iter().any(|&s| !(0.0..=1.0).contains(&s)) {
        return Err(Error::Contract(
            "mass bound exponents must lie in [0,1]".into(),
        ));
    }
    if trials == 0 {
        return Err(Error::Contract("mass bound needs trials ≥ 1".into()));
    }
    let report = measure.model().validate();
    if !report.all_ok() {
        return Err(Error::InvalidModel {
            reason: "mass bound verification requires a fully valid model".into(),
        });
    }
    let cube = bound_check_cube(measure.dim(), depth)?;
    let log2_masses: Vec<f64> = (0..trials)
        .map(|i| {
            let seeded = measure.with_seed(derive_seed(measure.seed(), i as u64));
            Ok(seeded.mass(&cube, depth)?.log2_mass)
        })
        .collect::<Result<Vec<f64>>>()?;
    let nd = (depth * measure.dim()) as f64;
    Ok(s_list
        .iter()
        .map(|&s| {
            let powered: Vec<f64> = log2_masses.iter().map(|&lm| (s * lm).exp2()).collect();
            let st = mean_stats(&powered);
            let bound = (-nd * measure.model().phi(s)).exp2();
            let rel_se = if st.mean > 0.0 {
                st.std_error / st.mean
            } else {
                0.0
            };
            MassBoundCheck {
                s,
                mean: st.mean,
                std_error: st.std_error,
                bound,
                pass: st.mean <= bound * (1.0 + 3.0 * rel_se),
            }
        })
        .collect())
}

/// Configuration of one KPZ experiment.
#[derive(Clone, Debug)]
pub struct KpzConfig {
    pub estimate: EstimateParams,
    pub tail: TailRule,
    pub master_seed: u64,
    pub tolerance: f64,
}

impl Default for KpzConfig {
    fn default() -> Self {
        KpzConfig {
            estimate: EstimateParams::default(),
            tail: TailRule::MeanOne,
            master_seed: 42,
            tolerance: 0.05,
        }
    }
}

/// Experiment-level provenance embedded in the report.
#[derive(Clone, Debug, Serialize)]
pub struct KpzProvenance {
    pub master_seed: u64,
    pub seeds: u32,
    pub n_min: u32,
    pub n_max: u32,
    pub tail: String,
    pub hash_version: String,
    pub zeta0_source: String,
}

/// Outcome of one KPZ experiment, tying measured ζ to the prediction.
#[derive(Clone, Debug)]
pub struct KpzReport {
    pub model: WeightModel,
    pub set: SetOracle,
    pub zeta0: f64,
    pub zeta_predicted: f64,
    pub zeta_measured: f64,
    pub stderr: f64,
    pub discrepancy: f64,
    pub validity: ValidityReport,
    pub provenance: KpzProvenance,
    /// The quenched estimate behind `zeta_measured` (tables included).
    pub measured_estimate: DimensionEstimate,
    /// Present when ζ₀ had to be measured under Lebesgue.
    pub lebesgue_estimate: Option<DimensionEstimate>,
}

/// The frozen JSON shape of a KPZ report.
#[derive(Clone, Debug, Serialize)]
pub struct KpzRecord {
    pub model: String,
    pub set: String,
    pub zeta0: f64,
    pub zeta_predicted: f64,
    pub zeta_measured: f64,
    pub stderr: f64,
    pub discrepancy: f64,
    pub validity: ValidityReport,
    pub provenance: KpzProvenance,
}

impl KpzReport {
    pub fn record(&self) -> KpzRecord {
        KpzRecord {
            model: self.model.spec_string(),
            set: self.set.spec_string(),
            zeta0: self.zeta0,
            zeta_predicted: self.zeta_predicted,
            zeta_measured: self.zeta_measured,
            stderr: self.stderr,
            discrepancy: self.discrepancy,
            validity: self.validity.clone(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        self.discrepancy <= tolerance
    }

    /// One-line verdict, e.g.
    /// `zeta0=0.50000 predicted=0.41259 measured=0.41081±0.00293 PASS(0.05)`.
    pub fn summary_line(&self, tolerance: f64) -> String {
        format!(
            "zeta0={:.5} predicted={:.5} measured={:.5}±{:.5} {}({})",
            self.zeta0,
            self.zeta_predicted,
            self.zeta_measured,
            self.stderr,
            if self.passes(tolerance) {
                "PASS"
            } else {
                "FAIL"
            },
            tolerance
        )
    }
}

/// Run the full KPZ pipeline for one (weight model, set) pair.
///
/// ζ₀ comes from the set's analytic value when known, otherwise from a
/// Lebesgue estimate; the prediction is φ⁻¹(ζ₀); the measured side is the
/// quenched cascade estimate across derived seeds.
pub fn kpz_experiment(model: &WeightModel, set: &SetOracle, cfg: &KpzConfig) -> Result<KpzReport> {
    let validity = model.validate();
    if !validity.all_ok() {
        return Err(Error::InvalidModel {
            reason: format!(
                "KPZ experiment requires a valid model (mean_ok={}, nondegenerate={}, \
                 phi_monotone={}, neg_moments_ok={})",
                validity.mean_ok,
                validity.nondegenerate,
                validity.phi_monotone,
                validity.neg_moments_ok
            ),
        });
    }
    if set.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: set.dim(),
        });
    }
    let lebesgue_estimate;
    let (zeta0, zeta0_source) = match set.analytic_zeta0() {
        Some(z) => {
            lebesgue_estimate = None;
            (z, "analytic")
        }
        None => {
            let est = estimate_dimension(&MeasureOracle::lebesgue(set.dim()), set, &cfg.estimate)?;
            let z = est.zeta_hat;
            lebesgue_estimate = Some(est);
            (z, "lebesgue-measured")
        }
    };
    let zeta_predicted = phi_inverse(model, zeta0)?;
    let oracle = MeasureOracle::cascade(CascadeMeasure::new(cfg.master_seed, *model), cfg.tail);
    let measured = estimate_dimension(&oracle, set, &cfg.estimate)?;
    Ok(KpzReport {
        model: *model,
        set: set.clone(),
        zeta0,
        zeta_predicted,
        zeta_measured: measured.zeta_hat,
        stderr: measured.stderr,
        discrepancy: (measured.zeta_hat - zeta_predicted).abs(),
        validity,
        provenance: KpzProvenance {
            master_seed: cfg.master_seed,
            seeds: cfg.estimate.seeds,
            n_min: cfg.estimate.n_min,
            n_max: cfg.estimate.n_max,
            tail: cfg.tail.spec_string(),
            hash_version: crate::rng::HASH_VERSION.into(),
            zeta0_source: zeta0_source.into(),
        },
        measured_estimate: measured,
        lebesgue_estimate,
    })
}
