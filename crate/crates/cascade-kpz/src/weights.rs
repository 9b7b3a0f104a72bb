//! The law of the cascade weight W: mean-one positive random variables,
//! their moments E[W^s], the entropy mean E[W ln W], and the admissibility
//! checks the cascade construction needs.
//!
//! Two families are supported. `LogNormal` is W = exp(σZ − σ²/2), mean one
//! by construction, with the closed-form moment E[W^s] = exp(σ²s(s−1)/2).
//! `TwoPoint` takes value a with probability p and b otherwise, subject to
//! pa + (1−p)b = 1; its moments are exact two-term sums, which makes it the
//! reference model for oracle tests (W ≡ 1 is the a = b = 1 special case).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::LOG2_E;

/// Grid resolution for the φ-monotonicity scan over [0,1].
const PHI_GRID: usize = 1001;
/// Tolerance on |E[W] − 1| for model admission.
const MEAN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightKind {
    LogNormal { sigma2: f64 },
    TwoPoint { a: f64, b: f64, p: f64 },
}

/// A weight law plus the spatial dimension it will drive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightModel {
    kind: WeightKind,
    dim: u32,
}

impl WeightModel {
    /// Lognormal weights from the variance σ² of the underlying Gaussian.
    pub fn log_normal(sigma2: f64, dim: u32) -> Result<Self> {
        if dim == 0 || dim > crate::dyadic::MAX_DIM {
            return Err(Error::UnsupportedDimension { dim });
        }
        if !sigma2.is_finite() || sigma2 <= 0.0 {
            return Err(Error::InvalidModel {
                reason: format!("lognormal needs sigma2 > 0, got {sigma2}"),
            });
        }
        Ok(WeightModel {
            kind: WeightKind::LogNormal { sigma2 },
            dim,
        })
    }

    /// Two-point weights P(W=a) = p, P(W=b) = 1−p with pa + (1−p)b = 1.
    pub fn two_point(a: f64, b: f64, p: f64, dim: u32) -> Result<Self> {
        if dim == 0 || dim > crate::dyadic::MAX_DIM {
            return Err(Error::UnsupportedDimension { dim });
        }
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::InvalidModel {
                reason: format!("twopoint needs a, b > 0, got a={a}, b={b}"),
            });
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidModel {
                reason: format!("twopoint needs p in (0,1), got {p}"),
            });
        }
        let mean = p * a + (1.0 - p) * b;
        if (mean - 1.0).abs() > MEAN_TOL {
            return Err(Error::InvalidModel {
                reason: format!("twopoint mean p·a + (1−p)·b = {mean} is not 1"),
            });
        }
        Ok(WeightModel {
            kind: WeightKind::TwoPoint { a, b, p },
            dim,
        })
    }

    /// The degenerate weight W ≡ 1 (the cascade collapses to Lebesgue).
    pub fn constant_unit(dim: u32) -> Result<Self> {
        Self::two_point(1.0, 1.0, 0.5, dim)
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.dim
    }

    #[inline]
    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    /// E[W^s], closed form for both families.
    pub fn moment(&self, s: f64) -> f64 {
        match self.kind {
            WeightKind::LogNormal { sigma2 } => (sigma2 * s * (s - 1.0) / 2.0).exp(),
            WeightKind::TwoPoint { a, b, p } => p * a.powf(s) + (1.0 - p) * b.powf(s),
        }
    }

    /// log2 E[W^s]; exact at s ∈ {0, 1} for both families.
    pub fn log2_moment(&self, s: f64) -> f64 {
        match self.kind {
            WeightKind::LogNormal { sigma2 } => sigma2 * s * (s - 1.0) / 2.0 * LOG2_E,
            WeightKind::TwoPoint { .. } => self.moment(s).log2(),
        }
    }

    /// E[W ln W] (natural log), the entropy mean of the nondegeneracy test.
    pub fn entropy_mean(&self) -> f64 {
        match self.kind {
            WeightKind::LogNormal { sigma2 } => sigma2 / 2.0,
            WeightKind::TwoPoint { a, b, p } => p * a * a.ln() + (1.0 - p) * b * b.ln(),
        }
    }

    /// The structure exponent φ(s) = s − log2 E[W^s].
    #[inline]
    pub fn phi(&self, s: f64) -> f64 {
        s - self.log2_moment(s)
    }

    /// Check every hypothesis the cascade experiments rely on.
    ///
    /// The flags are reported, not enforced; callers that require validity
    /// (the KPZ pipeline) reject on any false flag.
    pub fn validate(&self) -> ValidityReport {
        let mean = self.moment(1.0);
        let entropy = self.entropy_mean();
        let mut phi_min_step = f64::INFINITY;
        let mut prev = self.phi(0.0);
        for i in 1..PHI_GRID {
            let s = i as f64 / (PHI_GRID - 1) as f64;
            let cur = self.phi(s);
            phi_min_step = phi_min_step.min(cur - prev);
            prev = cur;
        }
        // Negative moments: finite for lognormal (closed form) and for any
        // two-point law with a, b > 0, which construction guarantees.
        let neg_moment_half = self.moment(-0.5);
        ValidityReport {
            mean_ok: (mean - 1.0).abs() <= MEAN_TOL,
            nondegenerate: entropy < self.dim as f64,
            phi_monotone: phi_min_step > 0.0,
            neg_moments_ok: neg_moment_half.is_finite(),
            diagnostics: ValidityDiagnostics {
                mean,
                entropy_mean: entropy,
                dim: self.dim,
                phi_min_step,
                neg_moment_half,
            },
        }
    }

    /// One W draw from a pair of uniforms in (0,1).
    ///
    /// LogNormal uses the Box–Muller cosine branch on the pair; TwoPoint
    /// thresholds the first component against p.
    pub fn sample(&self, u: (f64, f64)) -> Result<f64> {
        Ok(self.log2_sample(u)?.exp2())
    }

    /// log2 of one W draw; the cascade works here to dodge underflow.
    pub fn log2_sample(&self, u: (f64, f64)) -> Result<f64> {
        let (u1, u2) = u;
        if !(u1 > 0.0 && u1 < 1.0 && u2 > 0.0 && u2 < 1.0) {
            return Err(Error::Contract(format!(
                "uniform inputs must lie strictly inside (0,1), got ({u1}, {u2})"
            )));
        }
        Ok(match self.kind {
            WeightKind::LogNormal { sigma2 } => {
                let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
                (sigma2.sqrt() * z - sigma2 / 2.0) * LOG2_E
            }
            WeightKind::TwoPoint { a, b, p } => {
                if u1 < p {
                    a.log2()
                } else {
                    b.log2()
                }
            }
        })
    }

    /// Canonical config-grammar form, e.g. `lognormal(sigma2=0.5)`.
    pub fn spec_string(&self) -> String {
        match self.kind {
            WeightKind::LogNormal { sigma2 } => format!("lognormal(sigma2={sigma2})"),
            WeightKind::TwoPoint { a, b, p } => format!("twopoint(a={a},b={b},p={p})"),
        }
    }
}

/// Outcome of [`WeightModel::validate`].
#[derive(Clone, Debug, Serialize)]
pub struct ValidityReport {
    pub mean_ok: bool,
    /// E[W ln W] < d, the non-nullity condition for the limit measure.
    pub nondegenerate: bool,
    /// φ strictly increasing on a 1001-point grid of \[0,1\].
    pub phi_monotone: bool,
    /// E[W^{−s}] finite for s ∈ [0,1).
    pub neg_moments_ok: bool,
    pub diagnostics: ValidityDiagnostics,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidityDiagnostics {
    pub mean: f64,
    pub entropy_mean: f64,
    pub dim: u32,
    pub phi_min_step: f64,
    pub neg_moment_half: f64,
}

impl ValidityReport {
    pub fn all_ok(&self) -> bool {
        self.mean_ok && self.nondegenerate && self.phi_monotone && self.neg_moments_ok
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::mean_stats;
    use crate::rng::NodeState;

    /// Independent oracle: E[W^s] for the lognormal by Simpson quadrature
    /// of exp(s(σz − σ²/2)) against the standard normal density.
    fn lognormal_moment_quadrature(sigma2: f64, s: f64) -> f64 {
        let sigma = sigma2.sqrt();
        let f = |z: f64| {
            (s * (sigma * z - sigma2 / 2.0)).exp() * (-z * z / 2.0).exp()
                / (2.0 * std::f64::consts::PI).sqrt()
        };
        let (lo, hi, n) = (-14.0, 14.0, 20_000usize);
        let h = (hi - lo) / n as f64;
        let mut acc = f(lo) + f(hi);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(lo + i as f64 * h);
        }
        acc * h / 3.0
    }

    fn ln_model(sigma2: f64, dim: u32) -> WeightModel {
        WeightModel::log_normal(sigma2, dim).unwrap()
    }

    fn tp_model() -> WeightModel {
        WeightModel::two_point(0.5, 1.5, 0.5, 1).unwrap()
    }

    #[test]
    fn moment_endpoints_are_exactly_one() {
        for m in [ln_model(1.0, 1), tp_model()] {
            assert_eq!(m.moment(0.0), 1.0);
            assert_eq!(m.moment(1.0), 1.0);
        }
    }

    #[test]
    fn lognormal_moment_matches_quadrature_oracle() {
        let m = ln_model(1.0, 1);
        let expected = lognormal_moment_quadrature(1.0, 0.5);
        assert!((expected - (-0.125f64).exp()).abs() < 1e-9, "oracle sanity");
        assert!((m.moment(0.5) - expected).abs() < 1e-9);
        for s in [-0.5, 0.25, 1.7, 2.0] {
            let q = lognormal_moment_quadrature(1.0, s);
            assert!(
                (m.moment(s) - q).abs() < 1e-8 * q,
                "s={s}: closed {} vs quadrature {q}",
                m.moment(s)
            );
        }
    }

    #[test]
    fn two_point_moment_is_the_two_term_sum() {
        assert!((tp_model().moment(2.0) - 1.25).abs() < 1e-15);
        assert!(
            (tp_model().moment(-0.5) - 0.5 * (0.5f64.powf(-0.5) + 1.5f64.powf(-0.5))).abs() < 1e-15
        );
    }

    #[test]
    fn entropy_mean_values() {
        // Lognormal: d/ds E[W^s] at s=1 equals σ²/2; cross-check by a
        // central difference of the quadrature oracle.
        let m = ln_model(1.0, 1);
        assert_eq!(m.entropy_mean(), 0.5);
        let h = 1e-5;
        let fd = (lognormal_moment_quadrature(1.0, 1.0 + h)
            - lognormal_moment_quadrature(1.0, 1.0 - h))
            / (2.0 * h);
        assert!((fd - 0.5).abs() < 1e-6, "finite difference {fd}");

        let tp = tp_model();
        let direct = 0.5 * (0.5 * 0.5f64.ln() + 1.5 * 1.5f64.ln());
        assert!((tp.entropy_mean() - direct).abs() < 1e-15);
        assert!((direct - 0.13081).abs() < 5e-6);

        assert_eq!(WeightModel::constant_unit(1).unwrap().entropy_mean(), 0.0);
    }

    #[test]
    fn validity_gates() {
        // σ² = 0.5 is admissible in every supported dimension.
        for d in 1..=3 {
            let r = ln_model(0.5, d).validate();
            assert!(r.all_ok(), "σ²=0.5 d={d}: {r:?}");
        }
        // σ² = 4 in d = 1: entropy mean 2 ≥ 1.
        let r = ln_model(4.0, 1).validate();
        assert!(!r.nondegenerate);
        assert_eq!(r.diagnostics.entropy_mean, 2.0);
        // σ² = 2 in d = 2: nondegenerate but φ turns over near s = 1
        // (σ² > 2 ln 2).
        let r = ln_model(2.0, 2).validate();
        assert!(r.nondegenerate);
        assert!(!r.phi_monotone);
        assert!(r.diagnostics.phi_min_step < 0.0);
    }

    #[test]
    fn sample_two_point_thresholds() {
        let m = WeightModel::two_point(0.5, 1.5, 0.5, 1).unwrap();
        assert_eq!(m.sample((0.2, 0.9)).unwrap(), 0.5);
        assert_eq!(m.sample((0.9, 0.2)).unwrap(), 1.5);
    }

    #[test]
    fn sample_lognormal_box_muller_hand_value() {
        // u = (0.5, 0.25): z = √(−2 ln 0.5)·cos(π/2) = 0, so W = exp(−σ²/2).
        let m = ln_model(1.0, 1);
        let w = m.sample((0.5, 0.25)).unwrap();
        assert!((w - (-0.5f64).exp()).abs() < 1e-12, "w = {w}");
    }

    #[test]
    fn sample_rejects_boundary_uniforms() {
        let m = ln_model(1.0, 1);
        assert!(m.sample((0.0, 0.5)).is_err());
        assert!(m.sample((0.5, 1.0)).is_err());
    }

    #[test]
    fn sample_mean_consistency() {
        // |sample mean − 1| < 5·sd/√n over 10^5 draws, both families.
        let n = 100_000u64;
        for (tag, m) in [("lognormal", ln_model(0.5, 1)), ("twopoint", tp_model())] {
            let draws: Vec<f64> = (0..n)
                .map(|i| {
                    let st = NodeState::root(99, 1).child((i % 2) as u32);
                    m.sample(st.uniform_pair(i)).unwrap()
                })
                .collect();
            let st = mean_stats(&draws);
            assert!(
                (st.mean - 1.0).abs() < 5.0 * st.std_error,
                "{tag}: mean {} ± {}",
                st.mean,
                st.std_error
            );
        }
    }

    #[test]
    fn empirical_moments_match_closed_form() {
        let n = 100_000u64;
        for (tag, m) in [("lognormal", ln_model(0.5, 1)), ("twopoint", tp_model())] {
            for s in [-0.5, 0.5, 2.0] {
                let draws: Vec<f64> = (0..n)
                    .map(|i| {
                        let st = NodeState::root(7, 1).child((i % 2) as u32);
                        m.sample(st.uniform_pair(i)).unwrap().powf(s)
                    })
                    .collect();
                let st = mean_stats(&draws);
                assert!(
                    (st.mean - m.moment(s)).abs() < 3.0 * st.std_error,
                    "{tag} s={s}: {} vs {} (se {})",
                    st.mean,
                    m.moment(s),
                    st.std_error
                );
            }
        }
    }

    #[test]
    fn phi_fixed_points_and_concavity() {
        for m in [ln_model(0.5, 2), tp_model()] {
            assert_eq!(m.phi(0.0), 0.0);
            assert_eq!(m.phi(1.0), 1.0);
            // log2 E[W^s] convex in s ⟺ φ concave: second differences ≤ 0.
            let grid: Vec<f64> = (0..=40).map(|i| i as f64 / 40.0).collect();
            for w in grid.windows(3) {
                let (a, b, c) = (m.phi(w[0]), m.phi(w[1]), m.phi(w[2]));
                assert!(a + c - 2.0 * b <= 1e-12);
                let (la, lb, lc) = (
                    m.log2_moment(w[0]),
                    m.log2_moment(w[1]),
                    m.log2_moment(w[2]),
                );
                assert!(la + lc - 2.0 * lb >= -1e-12);
            }
        }
    }

    #[test]
    fn constructor_rejections() {
        assert!(WeightModel::log_normal(0.0, 1).is_err());
        assert!(WeightModel::log_normal(-1.0, 2).is_err());
        assert!(WeightModel::log_normal(0.5, 0).is_err());
        assert!(WeightModel::two_point(0.5, 1.4, 0.5, 1).is_err()); // mean ≠ 1
        assert!(WeightModel::two_point(-0.5, 1.5, 0.5, 1).is_err());
        assert!(WeightModel::two_point(0.5, 1.5, 0.0, 1).is_err());
    }
}
