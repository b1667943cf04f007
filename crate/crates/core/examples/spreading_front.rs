//! An epidemic front invading a homogeneous population: measured speed
//! against the predicted speed interval, and the state left behind.

use sirs::evolution::simulate;
use sirs::scenario::presets;
use sirs::speeds::speed_pair;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut scenario = presets::hom1();
    scenario.grid.domain_half_width = 150.0;
    scenario.grid.domain_step = 1.0 / 16.0;
    scenario.time.t_final = 60.0;
    scenario.time.snapshot_interval = Some(20.0);

    let pair = speed_pair(&scenario)?;
    let predicted = &pair.directions[0];
    let sim = simulate(&scenario)?;
    let d = &sim.diagnostics;
    println!("classification: {}", d.classification);
    for dir in &d.directions {
        if let Some(fit) = dir.fit {
            println!(
                "e = {:+}: measured {:.4} over t ∈ [{:.1}, {:.1}], predicted [{:.4}, {:.4}]",
                dir.direction[0],
                fit.speed,
                fit.window_start,
                fit.window_end,
                predicted.lower.speed,
                predicted.upper.speed
            );
        }
    }
    println!(
        "center (S, I, R) = ({:.4}, {:.4}, {:.4}), distance to the endemic state {:.2e}",
        d.center_values[0],
        d.center_values[1],
        d.center_values[2],
        d.center_distance.iter().fold(0.0f64, |a, b| a.max(*b))
    );
    println!("relative mass drift {:.1e}", d.mass_drift);
    for snap in &sim.snapshots {
        let front = sirs::evolution::front_position(&snap.i, sim.trace.threshold, &[1.0]);
        println!("t = {:>5.1}: front at {:>7.2}", snap.t, front);
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
