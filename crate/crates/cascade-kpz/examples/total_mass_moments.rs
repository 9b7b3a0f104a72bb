//! Total-mass martingale statistics.
//!
//! The truncated total mass ℓ_n has E[ℓ_n] = 1 at every depth, and for
//! square-integrable weights E[ℓ_n²] converges to the fixed point of
//! m ↦ 2^{−d}·E[V²]·m + (1 − 2^{−d}), where V is the per-node factor
//! (the product of d axis draws). For TwoPoint(0.5, 1.5, 0.5) in d=1 the
//! fixed point is exactly 4/3.
//!
//! ```bash
//! cargo run --release --example total_mass_moments
//! ```

use cascade_kpz::numerics::mean_stats;
use cascade_kpz::rng::derive_seed;
use cascade_kpz::{CascadeMeasure, WeightModel};

fn second_moment_recursion(dim: u32, v2: f64, n: u32) -> f64 {
    let q = 0.5f64.powi(dim as i32);
    let mut m = 1.0;
    for _ in 0..n {
        m = q * v2 * m + (1.0 - q);
    }
    m
}

fn main() {
    let model = WeightModel::two_point(0.5, 1.5, 0.5, 1).unwrap();
    let seeds = 4000u64;
    println!("TwoPoint(0.5, 1.5, 0.5) in d=1, {seeds} seeds per depth");
    println!(
        "{:>5} {:>20} {:>20} {:>12}",
        "depth", "mean(l_n) ± se", "mean(l_n^2) ± se", "E[l_n^2] exact"
    );
    for depth in [4u32, 8, 12] {
        let totals: Vec<f64> = (0..seeds)
            .map(|i| {
                CascadeMeasure::new(derive_seed(1, i), model)
                    .total_mass(depth)
                    .unwrap()
            })
            .collect();
        let squares: Vec<f64> = totals.iter().map(|l| l * l).collect();
        let m = mean_stats(&totals);
        let m2 = mean_stats(&squares);
        let oracle = second_moment_recursion(1, model.moment(2.0), depth);
        println!(
            "{depth:>5} {:>13.4} ±{:.4} {:>13.4} ±{:.4} {:>12.5}",
            m.mean, m.std_error, m2.mean, m2.std_error, oracle
        );
    }
    println!(
        "fixed point: {:.6} (= 4/3)",
        second_moment_recursion(1, model.moment(2.0), 500)
    );

    let ln = WeightModel::log_normal(0.5, 2).unwrap();
    let totals: Vec<f64> = (0..2000u64)
        .map(|i| {
            CascadeMeasure::new(derive_seed(2, i), ln)
                .total_mass(8)
                .unwrap()
        })
        .collect();
    let m = mean_stats(&totals);
    println!(
        "\nlognormal(sigma2=0.5) in d=2, depth 8: mean(l_n) = {:.4} ± {:.4}",
        m.mean, m.std_error
    );
}
