//! Command-line front end and the batch tools behind it: threshold
//! bisection, parameter sweeps and run reports.
//!
//! Numerics are configured only through scenario files; flags choose
//! input and output paths. The output root is `--out`, else `$SIRS_OUT`,
//! else `./sirs-out`.

use std::fs;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeffs::{c_taz_bound_from, lambda0_from};
use crate::eigen::drifted_principal_eigenvalue;
use crate::error::{Error, Result};
use crate::evolution::{simulate, Simulation};
use crate::grids::write_columns;
use crate::scenario::{Scenario, Tolerances};
use crate::speeds::{speed_pair, SpeedPair};
use crate::stationary::{compute_barriers, fixed_point, StationaryProblem, StationaryState};

pub const OUT_ENV: &str = "SIRS_OUT";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "sirs", version, about = "Periodic SIRS reaction-diffusion laboratory")]
pub struct Cli {
    /// Output root (default: $SIRS_OUT, else ./sirs-out).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Principal eigenvalue of −dΔ − γ*, optionally k(ρ) along the first direction.
    Eigen {
        scenario: PathBuf,
        /// Drift magnitudes r (ρ = r·e).
        #[arg(long, num_args = 1..)]
        rho: Vec<f64>,
    },
    /// Lower and upper spreading speeds per direction.
    Speed {
        scenario: PathBuf,
        /// Also write the r-scan tables.
        #[arg(long)]
        scan: bool,
    },
    /// Barriers and the endemic stationary state.
    Stationary { scenario: PathBuf },
    /// Time evolution with front tracking.
    Simulate { scenario: PathBuf },
    /// Bisection for the sign change of λ₁(−dΔ − γ*) along one parameter.
    Threshold {
        scenario: PathBuf,
        /// Dotted parameter path, e.g. `s0.value`.
        #[arg(long)]
        param: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
    /// Cross-product parameter sweep described by a sweep file.
    Sweep { sweep: PathBuf },
    /// Reproducibility report of every stage.
    Report {
        scenario: PathBuf,
        /// Include the time evolution stage.
        #[arg(long)]
        simulate: bool,
    },
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let root = output_root(cli.out.as_deref());
    match dispatch(&cli.command, &root) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn output_root(flag: Option<&Path>) -> PathBuf {
    match flag {
        Some(p) => p.to_path_buf(),
        None => std::env::var_os(OUT_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("sirs-out")),
    }
}

fn stage_dir(root: &Path, input: &Path, stage: &str) -> Result<PathBuf> {
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".into());
    let dir = root.join(stem).join(stage);
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    Ok(dir)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn with_file(path: &Path, f: impl FnOnce(&mut fs::File) -> std::io::Result<()>) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f(&mut file).map_err(|e| Error::io(path, e))
}

fn num(v: f64) -> String {
    format!("{v:.10e}")
}

fn dispatch(command: &Command, root: &Path) -> Result<()> {
    match command {
        Command::Eigen { scenario, rho } => cmd_eigen(scenario, rho, root),
        Command::Speed { scenario, scan } => cmd_speed(scenario, *scan, root),
        Command::Stationary { scenario } => cmd_stationary(scenario, root),
        Command::Simulate { scenario } => cmd_simulate(scenario, root),
        Command::Threshold {
            scenario,
            param,
            from,
            to,
            tol,
        } => cmd_threshold(scenario, param, *from, *to, *tol),
        Command::Sweep { sweep } => {
            let spec = SweepSpec::from_path(sweep)?;
            let dir = stage_dir(root, sweep, "sweep")?;
            let table = run_sweep(&spec, &dir)?;
            print!("{}", table.render());
            Ok(())
        }
        Command::Report { scenario, simulate } => {
            let s = Scenario::from_path(scenario)?;
            let (report, timings) = build_report(&s, *simulate);
            let dir = stage_dir(root, scenario, "report")?;
            write_file(&dir.join("report.toml"), &report.to_toml())?;
            write_file(&dir.join("timings.toml"), &timings.to_toml())?;
            print!("{}", report.to_toml());
            Ok(())
        }
    }
}

fn cmd_eigen(path: &Path, rho: &[f64], root: &Path) -> Result<()> {
    let s = Scenario::from_path(path)?;
    let p = StationaryProblem::new(&s)?;
    let settings = (&s.tolerances).into();
    let res = drifted_principal_eigenvalue(&p.gamma_star, p.coeffs.d, &[], &settings, None)?;
    let dir = stage_dir(root, path, "eigen")?;
    with_file(&dir.join("eigenfunction.txt"), |f| {
        write_columns(f, &[("gamma_star", &p.gamma_star), ("phi", &res.eigenfunction)])
    })?;
    println!("quantity value");
    println!("lambda1 {}", num(res.eigenvalue));
    println!("residual {}", num(res.residual));
    println!("iterations {}", res.iterations);
    println!("m {}", num(p.m));
    if !rho.is_empty() {
        let e = &s.directions()[0];
        println!();
        println!("r k");
        for &r in rho {
            let v: Vec<f64> = e.iter().map(|c| c * r).collect();
            let k = drifted_principal_eigenvalue(&p.gamma_star, p.coeffs.d, &v, &settings, None)?;
            println!("{} {}", num(r), num(k.eigenvalue));
        }
    }
    Ok(())
}

fn direction_label(e: &[f64]) -> String {
    e.iter().map(|c| format!("{c:+.4}")).collect::<Vec<_>>().join(",")
}

fn cmd_speed(path: &Path, scan: bool, root: &Path) -> Result<()> {
    let s = Scenario::from_path(path)?;
    let pair = speed_pair(&s)?;
    let dir = stage_dir(root, path, "speed")?;
    let table = speed_table(&pair);
    write_file(&dir.join("speeds.txt"), &table)?;
    print!("{table}");
    if scan {
        for (k, d) in pair.directions.iter().enumerate() {
            for (name, res) in [("lower", &d.lower), ("upper", &d.upper)] {
                let mut text = String::from("r k g\n");
                for p in &res.scan {
                    text.push_str(&format!("{} {} {}\n", num(p.r), num(p.k), num(p.g)));
                }
                write_file(&dir.join(format!("scan-{name}-{k}.txt")), &text)?;
            }
        }
    }
    Ok(())
}

pub fn speed_table(pair: &SpeedPair) -> String {
    let mut out = String::from("direction w_lower w_upper rho_e_lower rho_e_upper\n");
    for d in &pair.directions {
        out.push_str(&format!(
            "{} {} {} {} {}\n",
            direction_label(&d.upper.direction),
            num(d.lower.speed),
            num(d.upper.speed),
            num(d.lower.rho_dot_e()),
            num(d.upper.rho_dot_e()),
        ));
    }
    out
}

fn is_disease_free(e: &Error) -> bool {
    matches!(e, Error::Inapplicable(m) if m.starts_with("assumption1 fails"))
}

fn cmd_stationary(path: &Path, root: &Path) -> Result<()> {
    let s = Scenario::from_path(path)?;
    let p = StationaryProblem::new(&s)?;
    let st = match fixed_point(&p) {
        Ok(st) => st,
        Err(e) if is_disease_free(&e) => {
            println!("{e}");
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    let dir = stage_dir(root, path, "stationary")?;
    with_file(&dir.join("stationary.txt"), |f| {
        write_columns(f, &[("S", &st.s_star), ("I", &st.i_star), ("R", &st.r_star)])
    })?;
    let b = &st.barriers;
    with_file(&dir.join("barriers.txt"), |f| {
        write_columns(f, &[("I_bar", &b.i_bar), ("R_bar", &b.r_bar), ("I_under", &b.i_under)])
    })?;
    print!("{}", stationary_table(&st));
    for w in &st.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

pub fn stationary_table(st: &StationaryState) -> String {
    let mut out = String::from("field min max mean\n");
    for (name, f) in [("S", &st.s_star), ("I", &st.i_star), ("R", &st.r_star)] {
        out.push_str(&format!("{name} {} {} {}\n", num(f.min()), num(f.max()), num(f.mean())));
    }
    out.push_str(&format!(
        "\nresidual_S {}\nresidual_I {}\nresidual_R {}\niterations {}\ncontraction {}\nbarrier_contact {}\n",
        num(st.residual_s),
        num(st.residual_i),
        num(st.residual_r),
        st.iterations,
        num(st.contraction_estimate),
        st.barrier_contact
    ));
    out
}

fn cmd_simulate(path: &Path, root: &Path) -> Result<()> {
    let s = Scenario::from_path(path)?;
    let sim = simulate(&s)?;
    let dir = stage_dir(root, path, "simulate")?;
    write_simulation(&sim, &dir)?;
    print!("{}", sim.diagnostics.to_toml());
    Ok(())
}

/// Writes the trace, the snapshots and `diagnostics.toml` into `dir`.
pub fn write_simulation(sim: &Simulation, dir: &Path) -> Result<()> {
    let trace = &sim.trace;
    let mut text = String::from("t");
    for k in 0..trace.directions.len() {
        text.push_str(&format!(" front{k}"));
    }
    text.push_str(" n_deviation mass\n");
    for (k, t) in trace.times.iter().enumerate() {
        text.push_str(&num(*t));
        for p in &trace.positions[k] {
            text.push(' ');
            text.push_str(&num(*p));
        }
        text.push_str(&format!(" {} {}\n", num(sim.n_deviation[k]), num(sim.mass[k])));
    }
    write_file(&dir.join("trace.txt"), &text)?;
    for (k, snap) in sim.snapshots.iter().enumerate() {
        with_file(&dir.join(format!("snapshot-{k:04}.txt")), |f| {
            writeln!(f, "# t = {}", num(snap.t))?;
            write_columns(f, &[("S", &snap.s), ("I", &snap.i), ("R", &snap.r)])
        })?;
    }
    write_file(&dir.join("diagnostics.toml"), &sim.diagnostics.to_toml())
}

/// Outcome of a threshold bisection.
#[derive(Debug, Clone)]
pub struct Threshold {
    pub parameter: String,
    /// `None` when λ₁ has the same sign at both ends.
    pub critical: Option<f64>,
    /// `(value, λ₁)` for every evaluation, in order.
    pub evaluations: Vec<(f64, f64)>,
}

/// Bisects `[from, to]` for the sign change of `λ₁(−dΔ − γ*)` as the
/// parameter at `path` varies, down to an interval of width `tol`.
pub fn threshold_bisection(scenario: &Scenario, path: &str, from: f64, to: f64, tol: f64) -> Result<Threshold> {
    if !(from.is_finite() && to.is_finite() && from < to) {
        return Err(Error::validation("threshold", "need a finite range with from < to"));
    }
    if !(tol > 0.0) {
        return Err(Error::validation("threshold", "tolerance must be positive"));
    }
    let mut evaluations = Vec::new();
    let mut eval = |v: f64| -> Result<f64> {
        let mut s = scenario.clone();
        s.set_parameter(path, v)?;
        let p = StationaryProblem::new(&s)?;
        let l = p.principal_eigenvalue(&p.gamma_star)?;
        evaluations.push((v, l));
        Ok(l)
    };
    let (mut a, mut b) = (from, to);
    let fa = eval(a)?;
    let fb = eval(b)?;
    if fa.signum() == fb.signum() {
        return Ok(Threshold {
            parameter: path.into(),
            critical: None,
            evaluations,
        });
    }
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if eval(mid)?.signum() == fa.signum() {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(Threshold {
        parameter: path.into(),
        critical: Some(0.5 * (a + b)),
        evaluations,
    })
}

fn cmd_threshold(path: &Path, param: &str, from: f64, to: f64, tol: f64) -> Result<()> {
    let s = Scenario::from_path(path)?;
    let t = threshold_bisection(&s, param, from, to, tol)?;
    println!("{param} lambda1");
    for (v, l) in &t.evaluations {
        println!("{} {}", num(*v), num(*l));
    }
    match t.critical {
        Some(c) => println!("\ncritical {param} = {}", num(c)),
        None => println!("\nno sign change of lambda1 on [{from}, {to}]"),
    }
    Ok(())
}

/// Pipeline stages a sweep cell can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Eigen,
    Speed,
    Stationary,
    Simulate,
}

impl Stage {
    fn columns(self) -> &'static [&'static str] {
        match self {
            Stage::Eigen => &["lambda1"],
            Stage::Speed => &["w_lower", "w_upper"],
            Stage::Stationary => &["s_star_mean", "i_star_mean", "r_star_mean", "fp_iterations"],
            Stage::Simulate => &["measured_speed", "classification"],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub path: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepBase {
    /// Scenario file, relative to the sweep file.
    Path(PathBuf),
    Inline(Box<Scenario>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: SweepBase,
    #[serde(default)]
    pub axis: Vec<SweepAxis>,
    pub outputs: Vec<Stage>,
    #[serde(default = "default_max_cells")]
    pub max_cells: usize,
}

fn default_max_cells() -> usize {
    10_000
}

impl SweepSpec {
    pub fn inline(base: Scenario, axis: Vec<SweepAxis>, outputs: Vec<Stage>) -> Self {
        Self {
            base: SweepBase::Inline(Box::new(base)),
            axis,
            outputs,
            max_cells: default_max_cells(),
        }
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut spec: SweepSpec = toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: e
                .span()
                .map(|s| text[..s.start].matches('\n').count() + 1)
                .unwrap_or(0),
            key: String::new(),
            message: e.message().to_string(),
        })?;
        if let SweepBase::Path(p) = &spec.base {
            let resolved = path.parent().unwrap_or(Path::new(".")).join(p);
            spec.base = SweepBase::Inline(Box::new(Scenario::from_path(resolved)?));
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn base(&self) -> Result<Scenario> {
        match &self.base {
            SweepBase::Inline(s) => Ok((**s).clone()),
            SweepBase::Path(p) => Scenario::from_path(p),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.outputs.is_empty() {
            return Err(Error::validation("outputs", "request at least one stage"));
        }
        for a in &self.axis {
            if a.values.is_empty() {
                return Err(Error::validation(&a.path, "axis has no values"));
            }
            if a.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::validation(&a.path, "axis values must be finite"));
            }
        }
        let cells = self.cell_count();
        if cells > self.max_cells {
            return Err(Error::validation(
                "max_cells",
                format!("{cells} cells exceed the cap of {}", self.max_cells),
            ));
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.axis.iter().map(|a| a.values.len()).product()
    }

    /// Axis values of cell `index`; the last axis varies fastest.
    pub fn cell(&self, mut index: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.axis.len()];
        for (k, a) in self.axis.iter().enumerate().rev() {
            out[k] = a.values[index % a.values.len()];
            index /= a.values.len();
        }
        out
    }

    fn stages(&self) -> Vec<Stage> {
        let mut s = self.outputs.clone();
        s.sort();
        s.dedup();
        s
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["cell".to_string()];
        h.extend(self.axis.iter().map(|a| a.path.clone()));
        for s in self.stages() {
            h.extend(s.columns().iter().map(|c| c.to_string()));
        }
        h.push("status".into());
        h
    }
}

/// Result table of a sweep, one row per cell in cell order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub header: Vec<String>,
    pub rows: Vec<String>,
}

impl SweepTable {
    pub fn render(&self) -> String {
        let mut out = self.header.join(" ");
        out.push('\n');
        for r in &self.rows {
            out.push_str(r);
            out.push('\n');
        }
        out
    }

    /// Column `name` parsed as numbers (`NaN` where missing).
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| r.split_whitespace().nth(k).and_then(|v| v.parse().ok()).unwrap_or(f64::NAN))
                .collect(),
        )
    }
}

fn evaluate_cell(base: &Scenario, spec: &SweepSpec, values: &[f64]) -> Result<Vec<String>> {
    let mut s = base.clone();
    for (a, v) in spec.axis.iter().zip(values) {
        s.set_parameter(&a.path, *v)?;
    }
    let mut cols = Vec::new();
    for stage in spec.stages() {
        match stage {
            Stage::Eigen => {
                let p = StationaryProblem::new(&s)?;
                cols.push(num(p.principal_eigenvalue(&p.gamma_star)?));
            }
            Stage::Speed => {
                let pair = speed_pair(&s)?;
                let d = &pair.directions[0];
                cols.push(num(d.lower.speed));
                cols.push(num(d.upper.speed));
            }
            Stage::Stationary => {
                let st = fixed_point(&StationaryProblem::new(&s)?)?;
                cols.push(num(st.s_star.mean()));
                cols.push(num(st.i_star.mean()));
                cols.push(num(st.r_star.mean()));
                cols.push(st.iterations.to_string());
            }
            Stage::Simulate => {
                let sim = simulate(&s)?;
                let fit = sim.diagnostics.directions[0].fit;
                cols.push(fit.map(|f| num(f.speed)).unwrap_or_else(|| "-".into()));
                cols.push(sim.diagnostics.classification.to_string());
            }
        }
    }
    Ok(cols)
}

/// Runs every cell of the sweep in parallel. A finished cell leaves its
/// row in `dir/cells/`; rerunning skips those cells, so an interrupted
/// sweep resumes where it stopped. Failures fill the row with `-` and put
/// the message in the status column. The merged table goes to
/// `dir/sweep.txt`.
pub fn run_sweep(spec: &SweepSpec, dir: &Path) -> Result<SweepTable> {
    spec.validate()?;
    let base = spec.base()?;
    let cells_dir = dir.join("cells");
    fs::create_dir_all(&cells_dir).map_err(|e| Error::io(&cells_dir, e))?;
    let header = spec.header();
    let width = header.len() - spec.axis.len() - 2;

    let rows = (0..spec.cell_count())
        .into_par_iter()
        .map(|index| -> Result<String> {
            let marker = cells_dir.join(format!("cell-{index:06}.row"));
            if let Ok(row) = fs::read_to_string(&marker) {
                return Ok(row.trim_end().to_string());
            }
            let values = spec.cell(index);
            let outcome = catch_unwind(AssertUnwindSafe(|| evaluate_cell(&base, spec, &values)));
            let (cols, status) = match outcome {
                Ok(Ok(cols)) => (cols, "ok".to_string()),
                Ok(Err(e)) => (vec!["-".to_string(); width], format!("error: {e}")),
                Err(_) => (vec!["-".to_string(); width], "error: panic".to_string()),
            };
            let mut row = vec![index.to_string()];
            row.extend(values.iter().map(|v| num(*v)));
            row.extend(cols);
            row.push(status.replace('\n', " "));
            let row = row.join(" ");
            let tmp = marker.with_extension("tmp");
            write_file(&tmp, &format!("{row}\n"))?;
            fs::rename(&tmp, &marker).map_err(|e| Error::io(&marker, e))?;
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;

    let table = SweepTable { header, rows };
    write_file(&dir.join("sweep.txt"), &table.render())?;
    Ok(table)
}

/// One computed number with the stage and settings that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub name: String,
    pub value: f64,
    pub module: String,
    pub settings: String,
    /// Set instead of a value when the stage failed or is not numeric.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Everything needed to reproduce a run and every number it produced.
/// Wall-clock times go to a separate [`Timings`] document so that reports
/// of identical inputs are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub scenario_hash: String,
    pub tolerances: Tolerances,
    pub quantity: Vec<Quantity>,
    pub scenario: Scenario,
}

impl RunReport {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("report serializes")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            path: "report".into(),
            line: e
                .span()
                .map(|s| text[..s.start].matches('\n').count() + 1)
                .unwrap_or(0),
            key: String::new(),
            message: e.message().to_string(),
        })
    }

    pub fn get(&self, name: &str) -> Option<&Quantity> {
        self.quantity.iter().find(|q| q.name == name)
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings {
    /// Seconds per stage.
    pub stage: Vec<(String, f64)>,
}

impl Timings {
    pub fn to_toml(&self) -> String {
        let mut out = String::new();
        for (name, secs) in &self.stage {
            out.push_str(&format!("{name} = {secs:.6}\n"));
        }
        out
    }
}

struct ReportBuilder {
    quantity: Vec<Quantity>,
}

impl ReportBuilder {
    fn push(&mut self, name: impl Into<String>, value: f64, module: &str, settings: &str) {
        self.quantity.push(Quantity {
            name: name.into(),
            value,
            module: module.into(),
            settings: settings.into(),
            note: None,
        });
    }

    fn fail(&mut self, name: &str, module: &str, settings: &str, e: &Error) {
        self.quantity.push(Quantity {
            name: name.into(),
            value: f64::NAN,
            module: module.into(),
            settings: settings.into(),
            note: Some(e.to_string()),
        });
    }
}

/// Runs every stage on `scenario` and collects the results. Stage failures
/// are recorded in the report rather than aborting it.
pub fn build_report(scenario: &Scenario, with_simulation: bool) -> (RunReport, Timings) {
    let t = &scenario.tolerances;
    let mut b = ReportBuilder { quantity: Vec::new() };
    let mut timings = Timings::default();
    let eig = format!(
        "resolution={} tol={:e} residual_tol={:e}",
        scenario.grid.cell_resolution, t.eigen, t.eigen_residual
    );

    let clock = Instant::now();
    match StationaryProblem::new(scenario) {
        Ok(p) => {
            b.push("m", p.m, "coeffs", "cell average of s0");
            match lambda0_from(&p.coeffs) {
                Ok(v) => b.push("lambda0", v, "coeffs", "explicit bound"),
                Err(e) => b.fail("lambda0", "coeffs", "explicit bound", &e),
            }
            match c_taz_bound_from(&p.coeffs, scenario.is_homogeneous()) {
                Ok(v) => b.push("c_taz_bound", v, "coeffs", "explicit bound"),
                Err(e) => b.fail("c_taz_bound", "coeffs", "explicit bound", &e),
            }
            match compute_barriers(&p) {
                Ok(bars) => {
                    b.push("lambda1", bars.lambda1, "eigen", &eig);
                    b.push("lambda1_reduced", bars.lambda1_reduced, "eigen", &eig);
                }
                Err(e) => b.fail("lambda1", "eigen", &eig, &e),
            }
        }
        Err(e) => b.fail("lambda1", "eigen", &eig, &e),
    }
    timings.stage.push(("eigen".into(), clock.elapsed().as_secs_f64()));

    let clock = Instant::now();
    let sp = format!("scan=1e-2..1e2/40 rel_tol={:e} full={}", t.speed, scenario.speed.full_minimization);
    match speed_pair(scenario) {
        Ok(pair) => {
            for d in &pair.directions {
                let label = direction_label(&d.upper.direction);
                b.push(format!("w_lower[{label}]"), d.lower.speed, "speeds", &sp);
                b.push(format!("w_upper[{label}]"), d.upper.speed, "speeds", &sp);
            }
        }
        Err(e) => b.fail("w_upper", "speeds", &sp, &e),
    }
    timings.stage.push(("speeds".into(), clock.elapsed().as_secs_f64()));

    let clock = Instant::now();
    let fp = format!(
        "fp_tol={:e} max_iter={} relaxation={:e}",
        t.fixed_point, t.fixed_point_max_iter, t.relaxation
    );
    match StationaryProblem::new(scenario).and_then(|p| fixed_point(&p)) {
        Ok(st) => {
            for (name, f) in [("s_star", &st.s_star), ("i_star", &st.i_star), ("r_star", &st.r_star)] {
                b.push(format!("{name}_min"), f.min(), "stationary", &fp);
                b.push(format!("{name}_max"), f.max(), "stationary", &fp);
                b.push(format!("{name}_mean"), f.mean(), "stationary", &fp);
            }
            b.push("residual_s", st.residual_s, "stationary", &fp);
            b.push("residual_i", st.residual_i, "stationary", &fp);
            b.push("residual_r", st.residual_r, "stationary", &fp);
            b.push("fp_iterations", st.iterations as f64, "stationary", &fp);
            b.push("contraction_estimate", st.contraction_estimate, "stationary", &fp);
        }
        Err(e) => b.fail("i_star_mean", "stationary", &fp, &e),
    }
    timings.stage.push(("stationary".into(), clock.elapsed().as_secs_f64()));

    if with_simulation {
        let clock = Instant::now();
        let ev = format!(
            "L={} h={} t_final={} dt={}",
            scenario.grid.domain_half_width,
            scenario.grid.domain_step,
            scenario.time.t_final,
            scenario.time.dt.map(|d| d.to_string()).unwrap_or_else(|| "default".into())
        );
        match simulate(scenario) {
            Ok(sim) => {
                let d = &sim.diagnostics;
                b.push("sup_i_final", d.sup_i_final, "evolution", &ev);
                b.push("mass_drift", d.mass_drift, "evolution", &ev);
                b.push(
                    "spreading",
                    f64::from(u8::from(d.classification == crate::evolution::Classification::Spreading)),
                    "evolution",
                    &ev,
                );
                for dir in &d.directions {
                    if let Some(fit) = dir.fit {
                        b.push(
                            format!("measured_speed[{}]", direction_label(&dir.direction)),
                            fit.speed,
                            "evolution",
                            &ev,
                        );
                    }
                }
            }
            Err(e) => b.fail("sup_i_final", "evolution", &ev, &e),
        }
        timings.stage.push(("evolution".into(), clock.elapsed().as_secs_f64()));
    }

    (
        RunReport {
            tool: "sirs".into(),
            version: VERSION.into(),
            scenario_hash: scenario.hash(),
            tolerances: scenario.tolerances.clone(),
            quantity: b.quantity,
            scenario: scenario.clone(),
        },
        timings,
    )
}
