//! A resumable parameter sweep over the immunity-waning rate.

use sirs::cli::{run_sweep, Stage, SweepAxis, SweepSpec};
use sirs::scenario::presets;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SweepSpec::inline(
        presets::hom1(),
        vec![SweepAxis {
            path: "lambda.value".into(),
            values: vec![1.5, 2.0, 5.0, 10.0, 1e6],
        }],
        vec![Stage::Speed, Stage::Stationary],
    );
    let dir = std::env::temp_dir().join(format!("sirs-sweep-example-{}", std::process::id()));
    let first = run_sweep(&spec, &dir)?;
    print!("{}", first.render());

    // a second run only reads the per-cell markers
    let again = run_sweep(&spec, &dir)?;
    println!("rerun identical: {}", again == first);
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
