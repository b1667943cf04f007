//! Lower and upper spreading speeds of a scenario, and the raw minimization
//! for a single growth rate.

use std::f64::consts::PI;

use sirs::grids::{CellGrid, Field};
use sirs::scenario::presets;
use sirs::speeds::{fg_speed, homogeneous_speed, speed_pair, SpeedSettings};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let hom = speed_pair(&presets::hom1())?;
    let d = &hom.directions[0];
    println!(
        "HOM1: w_lower = {:.6} (closed form {:.6}), w_upper = {:.6} (closed form {:.6})",
        d.lower.speed,
        homogeneous_speed(1.0, 0.8)?,
        d.upper.speed,
        homogeneous_speed(1.0, 1.0)?
    );

    let het = speed_pair(&presets::het1())?;
    for d in &het.directions {
        println!(
            "HET1 e = {:+}: w_lower = {:.6}, w_upper = {:.6}",
            d.upper.direction[0], d.lower.speed, d.upper.speed
        );
    }

    let grid = CellGrid::new(1, 128)?;
    let gamma = Field::from_fn(grid, |x| 1.0 - 0.5 * (2.0 * PI * x[0]).cos());
    let res = fg_speed(&gamma, 1.0, &[1.0], &SpeedSettings::default())?;
    println!(
        "γ = 1 − cos(2πx)/2: speed {:.8} at ρ = {:.6}, {} eigensolves",
        res.speed, res.rho[0], res.evaluations
    );
    println!("scan near the minimum (r, −k(r)/r):");
    let best = res
        .scan
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.g.total_cmp(&b.1.g))
        .map(|(k, _)| k)
        .unwrap_or(0);
    for p in &res.scan[best.saturating_sub(2)..(best + 3).min(res.scan.len())] {
        println!("  {:>10.5} {:>12.8}", p.r, p.g);
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
