//! Critical initial susceptible density at which the disease-free state
//! loses stability, by bisection on the sign of λ₁.

use sirs::cli::threshold_bisection;
use sirs::scenario::presets;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for (alpha, mu) in [(1.0, 1.0), (2.0, 1.0), (1.0, 0.5)] {
        let s = presets::homogeneous(1.0, alpha, mu, 5.0, 2.0);
        let t = threshold_bisection(&s, "s0.value", 0.1, 3.0, 1e-4)?;
        println!(
            "α = {alpha}, μ = {mu}: critical S₀ = {:.5} (μ/α = {:.5}), {} eigensolves",
            t.critical.unwrap_or(f64::NAN),
            mu / alpha,
            t.evaluations.len()
        );
    }
    let t = threshold_bisection(&presets::het1(), "s0.value", 0.5, 2.0, 1e-4)?;
    println!(
        "HET1 (μ = 1 + cos(2πx)/2): critical S₀ = {:.5}",
        t.critical.unwrap_or(f64::NAN)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
