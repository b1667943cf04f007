//! Below threshold the infection dies out and susceptibles return to the
//! disease-free level.

use sirs::evolution::simulate;
use sirs::scenario::presets;
use sirs::stationary::StationaryProblem;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = presets::ext1();
    let p = StationaryProblem::new(&scenario)?;
    let lambda1 = p.principal_eigenvalue(&p.gamma_star)?;
    let sim = simulate(&scenario)?;
    let d = &sim.diagnostics;
    println!("λ₁ = {lambda1:.8} predicts {}, simulation says {}", d.predicted, d.classification);
    println!(
        "t = {}: sup I = {:.2e}, sup|S − M| = {:.2e}",
        d.t_final, d.sup_i_final, d.sup_s_deviation
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
