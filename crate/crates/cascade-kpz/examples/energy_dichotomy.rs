//! The Frostman energy dichotomy, empirically.
//!
//! Sampling the natural measure of a Cantor set with dimension ζ₀ = 0.5
//! and scanning the t-energy over growing truncation depths: for t below
//! ζ₀ the profile ratios settle to 1 (finite energy), above ζ₀ they settle
//! to a constant > 1 (divergence). The crossover certifies the dimension
//! from below.
//!
//! ```bash
//! cargo run --release --example energy_dichotomy
//! ```

use cascade_kpz::dimension::MeasureOracle;
use cascade_kpz::energy::energy_growth_profile;
use cascade_kpz::SetOracle;

fn main() {
    let cantor = SetOracle::dyadic_cantor(2, &[0, 3]).unwrap();
    let oracle = MeasureOracle::lebesgue(2);
    let depths: Vec<u32> = (6..=13).collect();
    println!(
        "t-energies of {} (zeta0 = 0.5) under Lebesgue, N = 1000, 5 seeds\n",
        cantor.spec_string()
    );
    for t in [0.2, 0.3, 0.4, 0.6, 0.7, 0.8] {
        let profile = energy_growth_profile(&oracle, &cantor, t, &depths, 1000, 5, 17).unwrap();
        let ratios: Vec<String> = profile.ratios.iter().map(|r| format!("{r:.3}")).collect();
        println!(
            "t = {t:<4} growth ratios [{}] → {:?}",
            ratios.join(", "),
            profile.growth
        );
    }
}
