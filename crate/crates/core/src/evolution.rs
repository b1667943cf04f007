//! Time evolution of the full SIRS system and of the reduced `(I, R)`
//! system on a truncated domain, with front tracking.
//!
//! One step is a Lie splitting. The reaction substep is linearly implicit
//! in the loss terms and conserves `N = S + I + R` pointwise:
//!
//! ```text
//! I' = I (1 + dt α S) / (1 + dt μ)
//! R' = (R + dt μ I') / (1 + dt λ)
//! S' = S − dt α S I + dt λ R'
//! ```
//!
//! so `I', R' ≥ 0` always and `S' ≥ 0` whenever `dt α I ≤ 1`. Each
//! component then takes one backward-Euler diffusion step, which is
//! monotone and preserves the discrete mass.

use serde::Serialize;

use crate::coeffs::{gamma_star_from, CoefficientSpec};
use crate::error::{Error, Result};
use crate::grids::{total_mass, CellField, DiffusionSolver, DomainField, DomainGrid, Field, Lattice};
use crate::scenario::Scenario;
use crate::stationary::{fixed_point, StationaryProblem, StationaryState};

/// Values below this are treated as rounding noise, not negativity.
pub const NEGATIVITY_TOLERANCE: f64 = 1e-12;
/// Minimum number of samples in a speed fit window.
pub const MIN_FIT_SAMPLES: usize = 10;
/// Share of the trace used by the speed fit.
pub const FIT_FRACTION: f64 = 0.4;
/// The front may not come closer to the boundary than this many cells.
pub const GUARD_CELLS: f64 = 5.0;

/// Coefficients sampled on the evolution domain.
#[derive(Debug, Clone)]
pub struct DomainCoefficients {
    pub d: f64,
    pub alpha: DomainField,
    pub mu: DomainField,
    pub lambda: DomainField,
    pub s0: DomainField,
}

fn sample(spec: &CoefficientSpec, grid: DomainGrid) -> DomainField {
    Field::from_fn(grid, |p| spec.eval(p))
}

impl DomainCoefficients {
    pub fn new(scenario: &Scenario) -> Result<Self> {
        let grid = scenario.domain_grid()?;
        Ok(Self {
            d: scenario.d,
            alpha: sample(&scenario.alpha, grid),
            mu: sample(&scenario.mu, grid),
            lambda: sample(&scenario.lambda, grid),
            s0: sample(&scenario.s0, grid),
        })
    }

    pub fn grid(&self) -> DomainGrid {
        *self.alpha.grid()
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionState {
    pub t: f64,
    pub step: usize,
    pub s: DomainField,
    pub i: DomainField,
    pub r: DomainField,
}

impl EvolutionState {
    /// `S = S₀`, `I = I₀`, `R = 0`.
    pub fn initial(scenario: &Scenario) -> Result<Self> {
        let grid = scenario.domain_grid()?;
        Ok(Self {
            t: 0.0,
            step: 0,
            s: sample(&scenario.s0, grid),
            i: Field::from_fn(grid, |p| scenario.i0.eval(p)),
            r: Field::zeros(grid),
        })
    }

    pub fn total(&self) -> DomainField {
        self.s
            .zip_with(&self.i, |s, i| s + i)
            .zip_with(&self.r, |n, r| n + r)
    }

    /// `Σ w_k N_k`.
    pub fn mass(&self) -> f64 {
        total_mass(&self.s) + total_mass(&self.i) + total_mass(&self.r)
    }

    fn check(&self) -> Result<()> {
        for (name, f) in [("S", &self.s), ("I", &self.i), ("R", &self.r)] {
            if let Some(k) = f
                .values()
                .iter()
                .position(|v| !v.is_finite() || *v < -NEGATIVITY_TOLERANCE)
            {
                let x = f.grid().point(k);
                return Err(Error::Blowup {
                    t: self.t,
                    step: self.step,
                    message: format!("{name} = {:e} at x = {:?}", f.values()[k], &x[..f.grid().dim()]),
                });
            }
        }
        Ok(())
    }
}

/// Default time step `0.2/(1 + sup γ* + sup αN₀)`.
pub fn default_dt(scenario: &Scenario) -> Result<f64> {
    let cell = scenario.cell_coefficients()?;
    let (gamma_star, _) = gamma_star_from(&cell);
    let coeffs = DomainCoefficients::new(scenario)?;
    let state = EvolutionState::initial(scenario)?;
    let n0 = state.total();
    let alpha_n = coeffs.alpha.zip_with(&n0, |a, n| a * n).max();
    Ok(0.2 / (1.0 + gamma_star.max().max(0.0) + alpha_n))
}

/// Time step used for a run: the configured or default step, shrunk so
/// that a whole number of steps reaches `t_final`.
pub fn run_dt(scenario: &Scenario) -> Result<(f64, usize)> {
    let dt_max = match scenario.time.dt {
        Some(dt) => dt,
        None => default_dt(scenario)?,
    };
    let n = (scenario.time.t_final / dt_max).ceil().max(1.0) as usize;
    Ok((scenario.time.t_final / n as f64, n))
}

/// Prefactored stepper for the full system.
#[derive(Debug, Clone)]
pub struct Integrator {
    pub coeffs: DomainCoefficients,
    pub dt: f64,
    solver: DiffusionSolver,
}

impl Integrator {
    pub fn new(scenario: &Scenario, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::validation("time.dt", "must be positive"));
        }
        let coeffs = DomainCoefficients::new(scenario)?;
        let solver = DiffusionSolver::new(coeffs.grid(), dt * coeffs.d);
        Ok(Self { coeffs, dt, solver })
    }

    pub fn step(&self, state: &mut EvolutionState) -> Result<()> {
        let dt = self.dt;
        let a = self.coeffs.alpha.values();
        let mu = self.coeffs.mu.values();
        let lam = self.coeffs.lambda.values();
        let s = state.s.values_mut();
        let i = state.i.values_mut();
        let r = state.r.values_mut();
        for k in 0..s.len() {
            let infection = dt * a[k] * s[k] * i[k];
            let i_new = (i[k] + infection) / (1.0 + dt * mu[k]);
            let r_new = (r[k] + dt * mu[k] * i_new) / (1.0 + dt * lam[k]);
            s[k] = s[k] - infection + dt * lam[k] * r_new;
            i[k] = i_new;
            r[k] = r_new;
        }
        let solver = &self.solver;
        rayon::join(
            || solver.solve_in_place(s),
            || rayon::join(|| solver.solve_in_place(i), || solver.solve_in_place(r)),
        );
        state.t += dt;
        state.step += 1;
        state.check()
    }
}

/// One step from `state` (builds the solver; prefer [`Integrator`] in loops).
pub fn step(state: &EvolutionState, scenario: &Scenario, dt: f64) -> Result<EvolutionState> {
    let mut next = state.clone();
    Integrator::new(scenario, dt)?.step(&mut next)?;
    Ok(next)
}

/// Largest `r ≥ 0` such that `I` at the node nearest `r·e` is at least
/// `threshold`, scanning `r` in steps of `h`; `−∞` when there is none.
pub fn front_position(i: &DomainField, threshold: f64, e: &[f64]) -> f64 {
    let grid = i.grid();
    let h = grid.spacing();
    let n1 = grid.shape()[1];
    let mut best = f64::NEG_INFINITY;
    for k in 0.. {
        let r = k as f64 * h;
        let nodes: Option<Vec<usize>> = (0..grid.dim()).map(|a| grid.nearest_node(r * e[a])).collect();
        let Some(nodes) = nodes else { break };
        let index = nodes.iter().fold(0, |acc, &n| acc * n1 + n);
        if i.values()[index] >= threshold {
            best = r;
        }
    }
    best
}

/// Least-squares line through a front trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeedFit {
    pub speed: f64,
    pub intercept: f64,
    /// Root mean square deviation from the fitted line.
    pub residual: f64,
    pub window_start: f64,
    pub window_end: f64,
    pub samples: usize,
}

/// Slope of `position(t)` over the last 40% of the samples, ignoring
/// samples without a front.
pub fn measure_speed(times: &[f64], positions: &[f64]) -> Result<SpeedFit> {
    let points: Vec<(f64, f64)> = times
        .iter()
        .zip(positions)
        .filter(|(_, p)| p.is_finite())
        .map(|(&t, &p)| (t, p))
        .collect();
    let total = points.len();
    let take = (FIT_FRACTION * total as f64).round() as usize;
    if take < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples {
            found: take,
            needed: MIN_FIT_SAMPLES,
        });
    }
    let window = &points[total - take..];
    let n = take as f64;
    let tm = window.iter().map(|p| p.0).sum::<f64>() / n;
    let pm = window.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = window.iter().map(|p| (p.0 - tm).powi(2)).sum();
    let stp: f64 = window.iter().map(|p| (p.0 - tm) * (p.1 - pm)).sum();
    let speed = stp / stt;
    let intercept = pm - speed * tm;
    let residual = (window
        .iter()
        .map(|p| (p.1 - intercept - speed * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(SpeedFit {
        speed,
        intercept,
        residual,
        window_start: window[0].0,
        window_end: window[take - 1].0,
        samples: take,
    })
}

/// Front positions over time, one column per direction.
#[derive(Debug, Clone)]
pub struct FrontTrace {
    pub threshold: f64,
    pub directions: Vec<Vec<f64>>,
    pub times: Vec<f64>,
    /// `positions[sample][direction]`.
    pub positions: Vec<Vec<f64>>,
}

impl FrontTrace {
    pub fn column(&self, direction: usize) -> Vec<f64> {
        self.positions.iter().map(|p| p[direction]).collect()
    }

    pub fn fit(&self, direction: usize) -> Result<SpeedFit> {
        measure_speed(&self.times, &self.column(direction))
    }

    /// Front position at the sample closest to time `t`.
    pub fn position_at(&self, t: f64, direction: usize) -> f64 {
        let k = (0..self.times.len())
            .min_by(|&a, &b| (self.times[a] - t).abs().total_cmp(&(self.times[b] - t).abs()))
            .expect("empty trace");
        self.positions[k][direction]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Spreading,
    Extinct,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Classification::Spreading => "spreading",
            Classification::Extinct => "extinct",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub s: DomainField,
    pub i: DomainField,
    pub r: DomainField,
}

#[derive(Debug, Clone, Serialize)]
pub struct DirectionSummary {
    pub direction: Vec<f64>,
    pub final_front: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<SpeedFit>,
}

/// Terminal summary of a run, serializable as flat key/value text.
#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub classification: Classification,
    /// From the sign of `λ₁(−dΔ − γ*)`.
    pub predicted: Classification,
    pub lambda1: f64,
    pub t_final: f64,
    pub steps: usize,
    pub dt: f64,
    pub threshold: f64,
    pub threshold_source: String,
    pub sup_i0: f64,
    pub sup_i_final: f64,
    /// `M = ⨍S₀`.
    pub m: f64,
    /// `sup|S(T) − M|`.
    pub sup_s_deviation: f64,
    pub mass_initial: f64,
    pub mass_final: f64,
    /// Largest relative mass change seen at trace times.
    pub mass_drift: f64,
    /// `sup|N − M|` at the start and the end.
    pub n_deviation_initial: f64,
    pub n_deviation_final: f64,
    /// `(S, I, R)` at the node nearest the origin.
    pub center_values: [f64; 3],
    /// Sup distance to the reference state over the central period.
    pub center_distance: [f64; 3],
    /// `"stationary"` or `"disease-free"`.
    pub reference: String,
    pub directions: Vec<DirectionSummary>,
    pub warnings: Vec<String>,
}

impl Diagnostics {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("diagnostics serialize")
    }
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub snapshots: Vec<Snapshot>,
    pub trace: FrontTrace,
    /// `sup|N − M|` at each trace time.
    pub n_deviation: Vec<f64>,
    /// Mass at each trace time.
    pub mass: Vec<f64>,
    pub diagnostics: Diagnostics,
    pub final_state: EvolutionState,
    pub stationary: Option<StationaryState>,
}

/// Index of the cell sample nearest a domain node (coefficients are
/// 1-periodic).
fn cell_index(cell: &CellField, x: [f64; 2]) -> usize {
    let g = cell.grid();
    let res = g.shape()[0];
    let idx = |v: f64| ((v - v.floor()) * res as f64).round() as usize % res;
    if g.dim() == 1 {
        idx(x[0])
    } else {
        idx(x[0]) * res + idx(x[1])
    }
}

fn central_nodes(grid: &DomainGrid) -> Vec<usize> {
    (0..grid.len())
        .filter(|&k| {
            let p = grid.point(k);
            p[..grid.dim()].iter().all(|x| (-0.5..0.5).contains(x))
        })
        .collect()
}

fn origin_node(grid: &DomainGrid) -> usize {
    let k = grid.nearest_node(0.0).expect("origin inside the domain");
    if grid.dim() == 1 {
        k
    } else {
        k * grid.shape()[1] + k
    }
}

/// Runs the full system to `t_final`, tracking fronts along the scenario's
/// directions.
pub fn simulate(scenario: &Scenario) -> Result<Simulation> {
    scenario.validate()?;
    let problem = StationaryProblem::new(scenario)?;
    let lambda1 = problem.principal_eigenvalue(&problem.gamma_star)?;
    let m = problem.m;
    let mut warnings = Vec::new();

    let stationary = if lambda1 < 0.0 {
        match fixed_point(&problem) {
            Ok(st) => Some(st),
            Err(e) => {
                warnings.push(format!("stationary state unavailable: {e}"));
                None
            }
        }
    } else {
        None
    };

    let mut state = EvolutionState::initial(scenario)?;
    let sup_i0 = state.i.max();
    let (threshold, threshold_source) = match (scenario.front.threshold, &stationary) {
        (Some(t), _) => (t, "configured".to_string()),
        (None, Some(st)) => (0.5 * st.i_star.min(), "half of min I*".to_string()),
        (None, None) => (1e-3 * sup_i0, "1e-3 sup I0".to_string()),
    };

    let (dt, steps) = run_dt(scenario)?;
    let integrator = Integrator::new(scenario, dt)?;
    let grid = integrator.coeffs.grid();
    let directions = scenario.directions();
    let guard = GUARD_CELLS * grid.spacing();
    let l = grid.half_width();

    let mut trace = FrontTrace {
        threshold,
        directions: directions.clone(),
        times: Vec::new(),
        positions: Vec::new(),
    };
    let mut n_deviation = Vec::new();
    let mut mass = Vec::new();
    let mut snapshots = Vec::new();
    let mass_initial = state.mass();

    let trace_every = scenario.time.trace_interval;
    let snap_every = scenario.time.snapshot_interval;
    let mut next_trace = 0.0;
    let mut next_snap = 0.0;
    let eps = 1e-9 * dt;

    for n in 0..=steps {
        if n > 0 {
            integrator.step(&mut state)?;
            state.t = n as f64 * dt;
        }
        let last = n == steps;
        if state.t + eps >= next_trace || last {
            let fronts: Vec<f64> = directions
                .iter()
                .map(|e| front_position(&state.i, threshold, e))
                .collect();
            for (e, &r) in directions.iter().zip(&fronts) {
                if r.is_finite() {
                    let reach = e.iter().map(|c| (c * r).abs()).fold(0.0, f64::max);
                    let distance = l - reach;
                    if distance < guard {
                        return Err(Error::DomainTooSmall {
                            t: state.t,
                            position: r,
                            distance,
                        });
                    }
                }
            }
            trace.times.push(state.t);
            trace.positions.push(fronts);
            n_deviation.push(state.total().values().iter().fold(0.0f64, |a, v| a.max((v - m).abs())));
            mass.push(state.mass());
            while next_trace <= state.t + eps {
                next_trace += trace_every;
            }
        }
        if let Some(every) = snap_every {
            if state.t + eps >= next_snap || last {
                snapshots.push(Snapshot {
                    t: state.t,
                    s: state.s.clone(),
                    i: state.i.clone(),
                    r: state.r.clone(),
                });
                while next_snap <= state.t + eps {
                    next_snap += every;
                }
            }
        }
    }

    let sup_i_final = state.i.max();
    let classification = if sup_i_final >= 1e-3 * sup_i0 {
        Classification::Spreading
    } else {
        Classification::Extinct
    };
    let predicted = if lambda1 < 0.0 {
        Classification::Spreading
    } else {
        Classification::Extinct
    };
    if classification != predicted {
        warnings.push(format!(
            "classification {classification} disagrees with the eigenvalue prediction {predicted}"
        ));
    }

    let center = central_nodes(&grid);
    let (reference, center_distance) = match &stationary {
        Some(st) => {
            let mut dist = [0.0f64; 3];
            for &k in &center {
                let c = cell_index(&st.s_star, grid.point(k));
                let pairs = [
                    (state.s.values()[k], st.s_star.values()[c]),
                    (state.i.values()[k], st.i_star.values()[c]),
                    (state.r.values()[k], st.r_star.values()[c]),
                ];
                for (slot, (a, b)) in dist.iter_mut().zip(pairs) {
                    *slot = slot.max((a - b).abs());
                }
            }
            ("stationary".to_string(), dist)
        }
        None => {
            let mut dist = [0.0f64; 3];
            for &k in &center {
                dist[0] = dist[0].max((state.s.values()[k] - m).abs());
                dist[1] = dist[1].max(state.i.values()[k].abs());
                dist[2] = dist[2].max(state.r.values()[k].abs());
            }
            ("disease-free".to_string(), dist)
        }
    };
    let o = origin_node(&grid);
    let center_values = [state.s.values()[o], state.i.values()[o], state.r.values()[o]];

    let summaries = directions
        .iter()
        .enumerate()
        .map(|(k, e)| DirectionSummary {
            direction: e.clone(),
            final_front: *trace.positions.last().map(|p| &p[k]).unwrap_or(&f64::NEG_INFINITY),
            fit: if classification == Classification::Spreading {
                trace.fit(k).ok()
            } else {
                None
            },
        })
        .collect();

    let mass_drift = mass
        .iter()
        .fold(0.0f64, |a, v| a.max(((v - mass_initial) / mass_initial).abs()));
    let diagnostics = Diagnostics {
        classification,
        predicted,
        lambda1,
        t_final: state.t,
        steps: state.step,
        dt,
        threshold,
        threshold_source,
        sup_i0,
        sup_i_final,
        m,
        sup_s_deviation: state.s.values().iter().fold(0.0f64, |a, v| a.max((v - m).abs())),
        mass_initial,
        mass_final: state.mass(),
        mass_drift,
        n_deviation_initial: n_deviation[0],
        n_deviation_final: *n_deviation.last().unwrap(),
        center_values,
        center_distance,
        reference,
        directions: summaries,
        warnings,
    };
    Ok(Simulation {
        snapshots,
        trace,
        n_deviation,
        mass,
        diagnostics,
        final_state: state,
        stationary,
    })
}

/// Settings of the reduced `(I, R)` system.
#[derive(Debug, Clone, Copy)]
pub struct ReducedOptions {
    pub d_i: f64,
    pub d_r: f64,
    /// Keep the `−αIR` term; without it `I` solves the scalar KPP
    /// equation exactly.
    pub couple_recovered: bool,
}

impl ReducedOptions {
    pub fn same_diffusivity(d: f64) -> Self {
        Self {
            d_i: d,
            d_r: d,
            couple_recovered: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReducedSnapshot {
    pub t: f64,
    pub i: DomainField,
    pub r: DomainField,
    /// Scalar KPP solution `ũ` with the same growth rate and initial datum.
    pub supersolution: DomainField,
}

#[derive(Debug, Clone)]
pub struct ReducedRun {
    pub dt: f64,
    pub options: ReducedOptions,
    pub snapshots: Vec<ReducedSnapshot>,
}

/// Integrates
///
/// ```text
/// ∂t I = d_I ΔI + γ(t,x) I − αI² − αIR
/// ∂t R = d_R ΔR + μI − λR
/// ∂t ũ = d_I Δũ + γ(t,x) ũ − αũ²
/// ```
///
/// with `γ = αN − μ` and `N` solving the heat equation with diffusivity
/// `d` from `S₀ + I₀`. Snapshots are taken at the snapshot interval, or the
/// trace interval when none is set.
pub fn simulate_reduced(scenario: &Scenario, options: &ReducedOptions) -> Result<ReducedRun> {
    scenario.validate()?;
    for (key, v) in [("d_i", options.d_i), ("d_r", options.d_r)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::validation(key, "diffusivity must be positive"));
        }
    }
    let (dt, steps) = run_dt(scenario)?;
    let coeffs = DomainCoefficients::new(scenario)?;
    let grid = coeffs.grid();
    let initial = EvolutionState::initial(scenario)?;
    let mut n = initial.total().into_values();
    let mut i = initial.i.into_values();
    let mut r = vec![0.0; i.len()];
    let mut u = i.clone();
    let heat = DiffusionSolver::new(grid, dt * scenario.d);
    let solve_i = DiffusionSolver::new(grid, dt * options.d_i);
    let solve_r = DiffusionSolver::new(grid, dt * options.d_r);
    let a = coeffs.alpha.values();
    let mu = coeffs.mu.values();
    let lam = coeffs.lambda.values();

    let every = scenario.time.snapshot_interval.unwrap_or(scenario.time.trace_interval);
    let eps = 1e-9 * dt;
    let mut next = 0.0;
    let mut t = 0.0;
    let mut snapshots = Vec::new();
    for step in 0..=steps {
        if step > 0 {
            for k in 0..n.len() {
                let gain = 1.0 + dt * a[k] * n[k];
                let coupling = if options.couple_recovered { a[k] * r[k] } else { 0.0 };
                let i_new = i[k] * gain / (1.0 + dt * (mu[k] + a[k] * i[k] + coupling));
                u[k] = u[k] * gain / (1.0 + dt * (mu[k] + a[k] * u[k]));
                r[k] = (r[k] + dt * mu[k] * i_new) / (1.0 + dt * lam[k]);
                i[k] = i_new;
            }
            rayon::join(
                || heat.solve_in_place(&mut n),
                || {
                    rayon::join(
                        || solve_i.solve_in_place(&mut i),
                        || {
                            solve_r.solve_in_place(&mut r);
                            solve_i.solve_in_place(&mut u);
                        },
                    )
                },
            );
            t = step as f64 * dt;
            if let Some(k) = i.iter().chain(&r).chain(&u).position(|v| !v.is_finite()) {
                return Err(Error::Blowup {
                    t,
                    step,
                    message: format!("non-finite value at flat index {k}"),
                });
            }
        }
        if t + eps >= next || step == steps {
            snapshots.push(ReducedSnapshot {
                t,
                i: Field::from_raw(grid, i.clone()),
                r: Field::from_raw(grid, r.clone()),
                supersolution: Field::from_raw(grid, u.clone()),
            });
            while next <= t + eps {
                next += every;
            }
        }
    }
    Ok(ReducedRun {
        dt,
        options: *options,
        snapshots,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub snapshots: usize,
    /// `max (I − ũ)` over all snapshots and nodes.
    pub max_violation: f64,
    pub worst_time: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// Checks `I ≤ ũ + tolerance` at every snapshot of a reduced run.
pub fn comparison_check(run: &ReducedRun) -> ComparisonReport {
    let tolerance = 1e-6 + 1e-3 * run.dt;
    let mut max_violation = f64::NEG_INFINITY;
    let mut worst_time = 0.0;
    for snap in &run.snapshots {
        let v = snap
            .i
            .values()
            .iter()
            .zip(snap.supersolution.values())
            .fold(f64::NEG_INFINITY, |m, (i, u)| m.max(i - u));
        if v > max_violation {
            max_violation = v;
            worst_time = snap.t;
        }
    }
    ComparisonReport {
        snapshots: run.snapshots.len(),
        max_violation,
        worst_time,
        tolerance,
        holds: max_violation <= tolerance,
    }
}
