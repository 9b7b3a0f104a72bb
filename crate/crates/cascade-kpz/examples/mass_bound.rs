//! The per-ball moment bound E[μ(B)^s] ≤ |B|^{φ(s)}.
//!
//! With the mean-one tail the truncated mean sits exactly at the bound, so
//! the Monte Carlo ratio mean/bound hovers around 1 (equality at s = 0 is
//! exact, s = 1 is the martingale mean). Heavier s means heavier tails and
//! wider error bars.
//!
//! ```bash
//! cargo run --release --example mass_bound
//! ```

use cascade_kpz::{verify_mass_bound, CascadeMeasure, WeightModel};

fn main() {
    let model = WeightModel::log_normal(0.5, 2).unwrap();
    let measure = CascadeMeasure::new(11, model);
    let depth = 6;
    let trials = 10_000;
    println!("depth-{depth} cube in d=2, lognormal(sigma2=0.5), {trials} seeds\n");
    println!(
        "{:>5} {:>13} {:>13} {:>10} {:>9} {:>6}",
        "s", "mean", "bound", "mean/bound", "3·relSE", "pass"
    );
    let checks = verify_mass_bound(&measure, depth, &[0.0, 0.25, 0.5, 0.75, 1.0], trials).unwrap();
    for c in checks {
        println!(
            "{:>5} {:>13.5e} {:>13.5e} {:>10.4} {:>9.4} {:>6}",
            c.s,
            c.mean,
            c.bound,
            c.mean / c.bound,
            3.0 * c.std_error / c.mean,
            c.pass
        );
    }
}
