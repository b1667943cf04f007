//! Problem instances and their plain-text configuration format.
//!
//! A scenario file is TOML. Top-level keys `dimension` and `d`, one table per
//! coefficient (`alpha`, `mu`, `lambda`, `s0`) tagged by `kind`, the
//! initial infection `[i0]`, and the `[grid]`, `[time]`, `[tolerances]`,
//! `[speed]` and `[front]` blocks. See `docs/scenario-format.md` for the
//! full schema.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coeffs::{sample_coefficient, Bump, CellCoefficients, CoefficientSpec};
use crate::error::{Error, Result};
use crate::grids::{Boundary, CellGrid, DomainGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    #[serde(default = "default_cell_resolution")]
    pub cell_resolution: usize,
    pub domain_half_width: f64,
    #[serde(default = "default_domain_step")]
    pub domain_step: f64,
    #[serde(default)]
    pub boundary: Boundary,
}

fn default_cell_resolution() -> usize {
    128
}

fn default_domain_step() -> f64 {
    1.0 / 32.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeParams {
    /// Evolution time step; derived from the reaction rates when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub t_final: f64,
    /// Spacing of recorded snapshots; none are kept when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_interval: Option<f64>,
    #[serde(default = "default_trace_interval")]
    pub trace_interval: f64,
}

fn default_trace_interval() -> f64 {
    0.5
}

/// Every numerical tolerance the pipeline uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Stop when successive eigenvalue estimates differ by less.
    pub eigen: f64,
    /// Required sup-norm residual of the eigenpair.
    pub eigen_residual: f64,
    pub eigen_max_iter: usize,
    /// Relative residual of Krylov solves.
    pub linear: f64,
    /// `T` relaxation stops once `sup|u(t+1) − u(t)|` falls below this.
    pub relaxation: f64,
    pub relaxation_max_time: f64,
    /// Bound on the three stationary residuals.
    pub stationary_residual: f64,
    /// Cell-L² increment that ends the fixed-point iteration.
    pub fixed_point: f64,
    pub fixed_point_max_iter: usize,
    /// Relative tolerance of the golden-section speed refinement.
    pub speed: f64,
    /// Pointwise slack of the invariant-set membership test.
    pub barrier_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eigen: 1e-9,
            eigen_residual: 1e-7,
            eigen_max_iter: 20_000,
            linear: 1e-12,
            relaxation: 1e-11,
            relaxation_max_time: 1e5,
            stationary_residual: 1e-8,
            fixed_point: 1e-8,
            fixed_point_max_iter: 200,
            speed: 1e-5,
            barrier_slack: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct SpeedParams {
    /// Directions `e`; both axis orientations in 1D, the four axis and four
    /// diagonal directions in 2D when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<Vec<f64>>>,
    /// Minimize over all `ρ` with `ρ·e > 0` instead of the ray `ρ ∥ e` (2D).
    pub full_minimization: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct FrontParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

/// A full problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dimension: usize,
    pub d: f64,
    pub alpha: CoefficientSpec,
    pub mu: CoefficientSpec,
    pub lambda: CoefficientSpec,
    pub s0: CoefficientSpec,
    pub i0: Bump,
    pub grid: GridParams,
    pub time: TimeParams,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub speed: SpeedParams,
    #[serde(default)]
    pub front: FrontParams,
}

impl Scenario {
    pub fn cell_grid(&self) -> Result<CellGrid> {
        CellGrid::new(self.dimension, self.grid.cell_resolution)
    }

    pub fn domain_grid(&self) -> Result<DomainGrid> {
        DomainGrid::new(
            self.dimension,
            self.grid.domain_half_width,
            self.grid.domain_step,
            self.grid.boundary,
        )
    }

    /// Coefficients sampled on the cell grid, positivity checked.
    pub fn cell_coefficients(&self) -> Result<CellCoefficients> {
        let grid = self.cell_grid()?;
        Ok(CellCoefficients {
            d: self.d,
            alpha: sample_coefficient(&self.alpha, grid, "alpha", true)?,
            mu: sample_coefficient(&self.mu, grid, "mu", true)?,
            lambda: sample_coefficient(&self.lambda, grid, "lambda", true)?,
            s0: sample_coefficient(&self.s0, grid, "s0", true)?,
        })
    }

    pub fn is_homogeneous(&self) -> bool {
        [&self.alpha, &self.mu, &self.lambda, &self.s0]
            .iter()
            .all(|c| c.as_constant().is_some())
    }

    /// Unit directions along which speeds and fronts are measured.
    pub fn directions(&self) -> Vec<Vec<f64>> {
        if let Some(dirs) = &self.speed.directions {
            return dirs
                .iter()
                .map(|e| {
                    let n = e.iter().map(|v| v * v).sum::<f64>().sqrt();
                    e.iter().map(|v| v / n).collect()
                })
                .collect();
        }
        if self.dimension == 1 {
            vec![vec![1.0], vec![-1.0]]
        } else {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            vec![
                vec![1.0, 0.0],
                vec![0.0, 1.0],
                vec![-1.0, 0.0],
                vec![0.0, -1.0],
                vec![s, s],
                vec![-s, s],
                vec![-s, -s],
                vec![s, -s],
            ]
        }
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.dimension;
        if !(1..=2).contains(&dim) {
            return Err(Error::validation("dimension", "must be 1 or 2"));
        }
        if !(self.d > 0.0 && self.d.is_finite()) {
            return Err(Error::validation("d", "diffusivity must be positive"));
        }
        for (key, c) in [
            ("alpha", &self.alpha),
            ("mu", &self.mu),
            ("lambda", &self.lambda),
            ("s0", &self.s0),
        ] {
            c.check_shape(key, dim)?;
        }
        if self.grid.cell_resolution < 16 {
            return Err(Error::validation(
                "grid.cell_resolution",
                "need at least 16 samples per period",
            ));
        }
        self.cell_coefficients()?;
        // positivity on a finer grid than the working one
        let fine = CellGrid::new(dim, if dim == 1 { 2048 } else { 128 })?;
        for (key, c) in [
            ("alpha", &self.alpha),
            ("mu", &self.mu),
            ("lambda", &self.lambda),
            ("s0", &self.s0),
        ] {
            sample_coefficient(c, fine, key, true)?;
        }
        let domain = self.domain_grid()?;
        let i0 = &self.i0;
        if i0.center.len() != dim {
            return Err(Error::validation("i0.center", format!("need {dim} coordinates")));
        }
        if !(i0.height > 0.0 && i0.height.is_finite()) {
            return Err(Error::validation("i0.height", "must be positive"));
        }
        if !(i0.radius > 0.0 && i0.radius.is_finite()) {
            return Err(Error::validation("i0.radius", "must be positive"));
        }
        let l = domain.half_width();
        if i0.center.iter().any(|c| c - i0.radius <= -l || c + i0.radius >= l) {
            return Err(Error::validation(
                "i0.center",
                "support of the initial infection must lie inside (-L, L)^n",
            ));
        }
        let t = &self.time;
        if !(t.t_final > 0.0 && t.t_final.is_finite()) {
            return Err(Error::validation("time.t_final", "must be positive"));
        }
        if let Some(dt) = t.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::validation("time.dt", "must be positive"));
            }
        }
        if let Some(s) = t.snapshot_interval {
            if !(s > 0.0) {
                return Err(Error::validation("time.snapshot_interval", "must be positive"));
            }
        }
        if !(t.trace_interval > 0.0) {
            return Err(Error::validation("time.trace_interval", "must be positive"));
        }
        let tol = &self.tolerances;
        for (key, v) in [
            ("tolerances.eigen", tol.eigen),
            ("tolerances.eigen_residual", tol.eigen_residual),
            ("tolerances.linear", tol.linear),
            ("tolerances.relaxation", tol.relaxation),
            ("tolerances.relaxation_max_time", tol.relaxation_max_time),
            ("tolerances.stationary_residual", tol.stationary_residual),
            ("tolerances.fixed_point", tol.fixed_point),
            ("tolerances.speed", tol.speed),
            ("tolerances.barrier_slack", tol.barrier_slack),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::validation(key, "must be positive"));
            }
        }
        if let Some(dirs) = &self.speed.directions {
            if dirs.is_empty()
                || dirs
                    .iter()
                    .any(|e| e.len() != dim || e.iter().all(|v| *v == 0.0))
            {
                return Err(Error::validation(
                    "speed.directions",
                    format!("need non-zero vectors with {dim} entries"),
                ));
            }
        }
        if let Some(th) = self.front.threshold {
            if !(th > 0.0) {
                return Err(Error::validation("front.threshold", "must be positive"));
            }
        }
        Ok(())
    }

    /// Parses and validates scenario text; `origin` names the source in
    /// error messages.
    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self> {
        let scenario: Scenario = toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| line_of_offset(text, s.start))
                .unwrap_or(0);
            Error::Parse {
                path: origin.to_string(),
                line,
                key: key_on_line(text, line),
                message: e.message().trim().to_string(),
            }
        })?;
        scenario.validate().map_err(|e| match e {
            Error::Validation { key, message } => Error::Parse {
                path: origin.to_string(),
                line: locate_key(text, &key).unwrap_or(0),
                key,
                message,
            },
            other => other,
        })?;
        Ok(scenario)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, &path.display().to_string())
    }

    /// Canonical TOML serialization; parsing it yields an equal scenario.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    /// SHA-256 of the canonical serialization, hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Sets a numeric parameter addressed by a dotted path such as
    /// `lambda.value`, `s0.mean`, `d` or `grid.domain_half_width`.
    pub fn set_parameter(&mut self, path: &str, value: f64) -> Result<()> {
        let mut doc: toml::Table = toml::from_str(&self.to_toml_string())
            .expect("canonical serialization parses");
        let parts: Vec<&str> = path.split('.').collect();
        let (last, parents) = parts.split_last().expect("non-empty path");
        let mut table = &mut doc;
        for p in parents {
            table = table
                .get_mut(*p)
                .and_then(|v| v.as_table_mut())
                .ok_or_else(|| Error::validation(path, "no such table"))?;
        }
        let slot = table
            .get_mut(*last)
            .ok_or_else(|| Error::validation(path, "no such parameter"))?;
        *slot = match slot {
            toml::Value::Integer(_) if value.fract() == 0.0 => toml::Value::Integer(value as i64),
            toml::Value::Integer(_) => {
                return Err(Error::validation(path, "parameter is an integer"))
            }
            toml::Value::Float(_) => toml::Value::Float(value),
            _ => return Err(Error::validation(path, "parameter is not numeric")),
        };
        let text = toml::to_string(&doc).expect("table serializes");
        *self = Scenario::from_toml_str(&text, path)?;
        Ok(())
    }

    pub fn get_parameter(&self, path: &str) -> Result<f64> {
        let doc: toml::Table = toml::from_str(&self.to_toml_string())
            .expect("canonical serialization parses");
        let mut value: Option<&toml::Value> = None;
        let mut table = &doc;
        for (i, p) in path.split('.').enumerate() {
            if i > 0 {
                table = value
                    .and_then(|v| v.as_table())
                    .ok_or_else(|| Error::validation(path, "no such table"))?;
            }
            value = table.get(p);
        }
        match value {
            Some(toml::Value::Float(f)) => Ok(*f),
            Some(toml::Value::Integer(i)) => Ok(*i as f64),
            _ => Err(Error::validation(path, "no such numeric parameter")),
        }
    }
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn key_on_line(text: &str, line: usize) -> String {
    let Some(l) = text.lines().nth(line.saturating_sub(1)) else {
        return String::new();
    };
    let l = l.trim();
    if let Some(h) = l.strip_prefix('[') {
        return h.trim_end_matches(']').trim().to_string();
    }
    l.split('=').next().unwrap_or("").trim().to_string()
}

/// Line of the dotted `key` in the document, if present.
fn locate_key(text: &str, key: &str) -> Option<usize> {
    let root = toml::de::DeTable::parse(text).ok()?;
    let mut table = root.get_ref();
    let mut found = None;
    for part in key.split('.') {
        let (k, v) = table.iter().find(|(k, _)| k.get_ref().as_ref() == part)?;
        found = Some(k.span().start);
        match v.get_ref().as_table() {
            Some(t) => table = t,
            None => break,
        }
    }
    found.map(|off| line_of_offset(text, off))
}

/// Ready-made scenarios used throughout the tests and examples.
pub mod presets {
    use super::*;

    /// Constant coefficients on a 1D line.
    pub fn homogeneous(d: f64, alpha: f64, mu: f64, lambda: f64, s0: f64) -> Scenario {
        Scenario {
            name: None,
            dimension: 1,
            d,
            alpha: CoefficientSpec::constant(alpha),
            mu: CoefficientSpec::constant(mu),
            lambda: CoefficientSpec::constant(lambda),
            s0: CoefficientSpec::constant(s0),
            i0: Bump {
                center: vec![0.0],
                radius: 1.0,
                height: 0.1,
            },
            grid: GridParams {
                cell_resolution: 128,
                domain_half_width: 300.0,
                domain_step: 1.0 / 32.0,
                boundary: Boundary::Periodic,
            },
            time: TimeParams {
                dt: None,
                t_final: 120.0,
                snapshot_interval: None,
                trace_interval: 0.5,
            },
            tolerances: Tolerances::default(),
            speed: SpeedParams::default(),
            front: FrontParams::default(),
        }
    }

    /// `d=1, α=1, μ=1, λ=5, S₀=2`: spreading with speeds in `[2√0.8, 2]`.
    pub fn hom1() -> Scenario {
        Scenario {
            name: Some("HOM1".into()),
            ..homogeneous(1.0, 1.0, 1.0, 5.0, 2.0)
        }
    }

    /// `α=1, μ=2, λ=1, S₀=1`: `γ* ≡ −1`, the infection dies out.
    pub fn ext1() -> Scenario {
        let mut s = homogeneous(1.0, 1.0, 2.0, 1.0, 1.0);
        s.name = Some("EXT1".into());
        s.grid.domain_half_width = 100.0;
        s.time.t_final = 100.0;
        s
    }

    /// `μ(x) = 1 + 0.5cos(2πx)`, `α ≡ 1`, `λ ≡ 20`, `S₀ ≡ 2`, `d = 1`.
    pub fn het1() -> Scenario {
        let mut s = homogeneous(1.0, 1.0, 1.0, 20.0, 2.0);
        s.name = Some("HET1".into());
        s.mu = CoefficientSpec::cosine_1d(1.0, &[(0.5, 1)]);
        s
    }
}
