//! Barriers and the endemic stationary state from the `T∘A∘Z` iteration.

use sirs::coeffs::{c_taz_bound, lambda0};
use sirs::scenario::presets;
use sirs::stationary::{fixed_point, invariant_set_check, op_taz, StationaryProblem};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = presets::het1();
    println!(
        "HET1: Λ₀ = {:.4}, contraction bound {:.4}",
        lambda0(&scenario)?,
        c_taz_bound(&scenario)?
    );
    let problem = StationaryProblem::new(&scenario)?;
    let st = fixed_point(&problem)?;
    let b = &st.barriers;
    println!(
        "barriers: Ī ∈ [{:.6}, {:.6}], I̲ ∈ [{:.6}, {:.6}], sup R̄ = {:.6}",
        b.i_bar.min(),
        b.i_bar.max(),
        b.i_under.min(),
        b.i_under.max(),
        b.r_bar.max()
    );
    for (name, f) in [("S*", &st.s_star), ("I*", &st.i_star), ("R*", &st.r_star)] {
        println!("{name}: min {:.8}, max {:.8}, mean {:.8}", f.min(), f.max(), f.mean());
    }
    println!(
        "{} iterations, observed contraction {:.4}, residuals ({:.1e}, {:.1e}, {:.1e})",
        st.iterations, st.contraction_estimate, st.residual_s, st.residual_i, st.residual_r
    );
    let image = op_taz(&st.i_star, &problem)?;
    println!(
        "I* in the invariant set: {}, image in it: {}",
        invariant_set_check(&st.i_star, b, 1e-7),
        invariant_set_check(&image, b, 1e-7)
    );

    match fixed_point(&StationaryProblem::new(&presets::ext1())?) {
        Ok(_) => println!("EXT1 unexpectedly has an endemic state"),
        Err(e) => println!("EXT1: {e}"),
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
