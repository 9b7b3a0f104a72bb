//! Check weight models against the cascade hypotheses.
//!
//! A model is admissible when it has mean one, is nondegenerate
//! (E[W ln W] < d, so the limit measure is almost surely non-null), has a
//! monotone structure exponent φ on [0,1] (so the KPZ identity inverts),
//! and has finite negative moments.
//!
//! ```bash
//! cargo run --release --example validate_weights
//! ```

use cascade_kpz::WeightModel;

fn main() {
    let cases = [
        (
            "admissible default",
            WeightModel::log_normal(0.5, 2).unwrap(),
        ),
        (
            "degenerate in d=1",
            WeightModel::log_normal(4.0, 1).unwrap(),
        ),
        ("non-monotone phi", WeightModel::log_normal(2.0, 2).unwrap()),
        (
            "two-point oracle",
            WeightModel::two_point(0.5, 1.5, 0.5, 1).unwrap(),
        ),
        ("constant W = 1", WeightModel::constant_unit(2).unwrap()),
    ];
    for (tag, model) in cases {
        let r = model.validate();
        println!(
            "{tag:<20} {:<28} d={}  mean_ok={} nondegenerate={} phi_monotone={} neg_moments_ok={}",
            model.spec_string(),
            model.dim(),
            r.mean_ok,
            r.nondegenerate,
            r.phi_monotone,
            r.neg_moments_ok,
        );
        println!(
            "{:20} E[W ln W] = {:.4}, min phi step = {:+.2e}, E[W^-1/2] = {:.4}",
            "",
            r.diagnostics.entropy_mean,
            r.diagnostics.phi_min_step,
            r.diagnostics.neg_moment_half,
        );
    }
}
