//! Scenario files: parsing, error locations, parameter paths and the run
//! report that reproduces a run.

use sirs::cli::{build_report, RunReport};
use sirs::Scenario;

const TEXT: &str = r#"
name = "patchy"
dimension = 1
d = 0.5

[alpha]
kind = "constant"
value = 1.0

[mu]
kind = "piecewise_constant"
breakpoints = [0.5]
values = [0.8, 1.2]

[lambda]
kind = "constant"
value = 10.0

[s0]
kind = "cosine_series"
mean = 2.0
terms = [{ amplitude = 0.3, frequency = [1] }]

[i0]
center = [0.0]
radius = 1.0
height = 0.1

[grid]
cell_resolution = 64
domain_half_width = 50.0

[time]
t_final = 10.0
"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut s = Scenario::from_toml_str(TEXT, "patchy.toml")?;
    println!("parsed `{}`, hash {}", s.name.as_deref().unwrap_or(""), &s.hash()[..16]);

    let broken = TEXT.replace("d = 0.5", "d = -0.5");
    match Scenario::from_toml_str(&broken, "broken.toml") {
        Ok(_) => println!("negative diffusivity accepted?"),
        Err(e) => println!("rejected with exit code {}: {e}", e.exit_code()),
    }

    s.set_parameter("lambda.value", 20.0)?;
    println!("lambda.value is now {}", s.get_parameter("lambda.value")?);
    let back = Scenario::from_toml_str(&s.to_toml_string(), "round-trip")?;
    println!("round trip preserves the model: {}", back == s);

    let (report, timings) = build_report(&s, false);
    let text = report.to_toml();
    let parsed = RunReport::from_toml_str(&text)?;
    println!(
        "report: {} quantities, reconstructs scenario: {}",
        parsed.quantity.len(),
        parsed.scenario == s
    );
    for q in parsed.quantity.iter().filter(|q| q.name.starts_with("w_") || q.name == "lambda1") {
        println!("  {} = {:.8} ({})", q.name, q.value, q.module);
    }
    println!("stage timings:\n{}", timings.to_toml());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
