//! Principal periodic eigenvalue of `−dΔ − γ` and the drifted eigenvalue
//! `k(ρ)` that feeds the speed formula.

use std::f64::consts::PI;

use sirs::eigen::{drifted_principal_eigenvalue, principal_eigenpair, EigenSettings};
use sirs::grids::{CellGrid, Field};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let settings = EigenSettings::default();
    let grid = CellGrid::new(1, 128)?;

    // constant growth: λ₁ = −γ̄ and k(ρ) = −(dρ² + γ̄)
    let flat = Field::constant(grid, 1.0);
    let l1 = principal_eigenpair(&flat, 1.0, &settings)?;
    println!("constant γ = 1: λ₁ = {:.10}", l1.eigenvalue);

    let gamma = Field::from_fn(grid, |x| 1.0 - 0.5 * (2.0 * PI * x[0]).cos());
    let pair = principal_eigenpair(&gamma, 1.0, &settings)?;
    println!(
        "γ = 1 − cos(2πx)/2: λ₁ = {:.12}, residual {:.1e}, {} iterations",
        pair.eigenvalue, pair.residual, pair.iterations
    );
    println!(
        "eigenfunction: min {:.6}, max {:.6} (normalized to sup = 1)",
        pair.eigenfunction.min(),
        pair.eigenfunction.max()
    );

    println!("{:>6} {:>16}", "ρ", "k(ρ)");
    let mut warm = None;
    for rho in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let k = drifted_principal_eigenvalue(&gamma, 1.0, &[rho], &settings, warm.as_ref())?;
        println!("{rho:>6} {:>16.12}", k.eigenvalue);
        warm = Some(k.eigenfunction);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
