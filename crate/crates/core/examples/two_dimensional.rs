//! A two-dimensional cell: direction-dependent speeds for a growth rate
//! that only varies along the first axis.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use sirs::eigen::{principal_eigenpair, EigenSettings};
use sirs::grids::{CellGrid, Field};
use sirs::speeds::{fg_speed, SpeedSettings};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let grid = CellGrid::new(2, 32)?;
    let gamma = Field::from_fn(grid, |x| 1.0 + 0.5 * (2.0 * PI * x[0]).cos());
    let l1 = principal_eigenpair(&gamma, 1.0, &EigenSettings::default())?;
    println!("λ₁ = {:.8}", l1.eigenvalue);

    let ray = SpeedSettings::default();
    let full = SpeedSettings {
        full_minimization: true,
        ..ray
    };
    for e in [[1.0, 0.0], [0.0, 1.0], [FRAC_1_SQRT_2, FRAC_1_SQRT_2]] {
        let on_ray = fg_speed(&gamma, 1.0, &e, &ray)?;
        let best = fg_speed(&gamma, 1.0, &e, &full)?;
        println!(
            "e = ({:.3}, {:.3}): ray speed {:.6}, half-plane speed {:.6} at ρ = ({:.4}, {:.4})",
            e[0], e[1], on_ray.speed, best.speed, best.rho[0], best.rho[1]
        );
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
