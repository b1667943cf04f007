//! Periodic coefficients, the localized initial infection, and the derived
//! quantities of a scenario: `γ*`, the susceptible average `M`, the
//! immunity-waning threshold `Λ₀` and the contraction constant `C_TAZ`.
//!
//! All functions are 1-periodic in each coordinate. Extrema are taken over
//! the sampled cell grid, so `Λ₀` and `C_TAZ` carry grid accuracy.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grids::{CellField, CellGrid, Field, Lattice};
use crate::scenario::Scenario;

/// One term `amplitude · cos(2π k·x + phase)` of a cosine series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosineTerm {
    pub amplitude: f64,
    pub frequency: Vec<i64>,
    #[serde(default)]
    pub phase: f64,
}

/// Symbolic description of a periodic coefficient on the unit cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientSpec {
    Constant {
        value: f64,
    },
    CosineSeries {
        mean: f64,
        #[serde(default)]
        terms: Vec<CosineTerm>,
    },
    /// Step function of one coordinate: `values[k]` on the k-th interval cut
    /// by the sorted `breakpoints` in `(0, 1)`.
    PiecewiseConstant {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
        #[serde(default, skip_serializing_if = "is_zero")]
        axis: usize,
    },
}

fn is_zero(v: &usize) -> bool {
    *v == 0
}

fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

impl CoefficientSpec {
    pub fn constant(value: f64) -> Self {
        CoefficientSpec::Constant { value }
    }

    /// `mean + Σ amplitude·cos(2π k·x)` in 1D, integer frequencies.
    pub fn cosine_1d(mean: f64, terms: &[(f64, i64)]) -> Self {
        CoefficientSpec::CosineSeries {
            mean,
            terms: terms
                .iter()
                .map(|&(amplitude, k)| CosineTerm {
                    amplitude,
                    frequency: vec![k],
                    phase: 0.0,
                })
                .collect(),
        }
    }

    pub fn eval(&self, x: [f64; 2]) -> f64 {
        match self {
            CoefficientSpec::Constant { value } => *value,
            CoefficientSpec::CosineSeries { mean, terms } => {
                mean + terms
                    .iter()
                    .map(|t| {
                        // integer frequencies: reduce the phase argument
                        // mod 1 so x and x+k agree to rounding
                        let arg: f64 = t
                            .frequency
                            .iter()
                            .zip(x)
                            .map(|(&k, xi)| k as f64 * frac(xi))
                            .sum();
                        t.amplitude * (2.0 * PI * frac(arg) + t.phase).cos()
                    })
                    .sum::<f64>()
            }
            CoefficientSpec::PiecewiseConstant {
                breakpoints,
                values,
                axis,
            } => {
                let t = frac(x[*axis]);
                let k = breakpoints.iter().take_while(|&&b| b <= t).count();
                values[k]
            }
        }
    }

    /// The constant value, when the coefficient is homogeneous.
    pub fn as_constant(&self) -> Option<f64> {
        match self {
            CoefficientSpec::Constant { value } => Some(*value),
            CoefficientSpec::CosineSeries { mean, terms }
                if terms.iter().all(|t| t.amplitude == 0.0) =>
            {
                Some(*mean)
            }
            CoefficientSpec::PiecewiseConstant { values, .. }
                if values.windows(2).all(|w| w[0] == w[1]) =>
            {
                values.first().copied()
            }
            _ => None,
        }
    }

    /// The coefficient translated by `shift`: `x ↦ f(x − shift)`.
    pub fn translated(&self, shift: [f64; 2]) -> Self {
        match self {
            CoefficientSpec::Constant { .. } => self.clone(),
            CoefficientSpec::CosineSeries { mean, terms } => CoefficientSpec::CosineSeries {
                mean: *mean,
                terms: terms
                    .iter()
                    .map(|t| {
                        let k_dot_s: f64 =
                            t.frequency.iter().zip(shift).map(|(&k, s)| k as f64 * s).sum();
                        CosineTerm {
                            phase: t.phase - 2.0 * PI * k_dot_s,
                            ..t.clone()
                        }
                    })
                    .collect(),
            },
            CoefficientSpec::PiecewiseConstant {
                breakpoints, axis, ..
            } => {
                let s = shift[*axis];
                let mut cuts: Vec<f64> = std::iter::once(&0.0)
                    .chain(breakpoints)
                    .map(|b| frac(b + s))
                    .collect();
                cuts.retain(|&c| c > 0.0);
                cuts.sort_by(f64::total_cmp);
                cuts.dedup();
                let mut edges = vec![0.0];
                edges.extend(&cuts);
                edges.push(1.0);
                let mut values: Vec<f64> = edges
                    .windows(2)
                    .map(|w| {
                        let mut p = [0.0; 2];
                        p[*axis] = 0.5 * (w[0] + w[1]) - s;
                        self.eval(p)
                    })
                    .collect();
                // drop cuts that do not change the value
                let mut k = 0;
                while k < cuts.len() {
                    if values[k] == values[k + 1] {
                        cuts.remove(k);
                        values.remove(k + 1);
                    } else {
                        k += 1;
                    }
                }
                CoefficientSpec::PiecewiseConstant {
                    breakpoints: cuts,
                    values,
                    axis: *axis,
                }
            }
        }
    }

    pub(crate) fn check_shape(&self, key: &str, dim: usize) -> Result<()> {
        match self {
            CoefficientSpec::Constant { value } if !value.is_finite() => {
                Err(Error::validation(format!("{key}.value"), "must be finite"))
            }
            CoefficientSpec::CosineSeries { mean, terms } => {
                if !mean.is_finite() {
                    return Err(Error::validation(format!("{key}.mean"), "must be finite"));
                }
                for t in terms {
                    if t.frequency.len() != dim {
                        return Err(Error::validation(
                            format!("{key}.terms"),
                            format!("frequency vectors need {dim} integer entries"),
                        ));
                    }
                    if !(t.amplitude.is_finite() && t.phase.is_finite()) {
                        return Err(Error::validation(format!("{key}.terms"), "must be finite"));
                    }
                }
                Ok(())
            }
            CoefficientSpec::PiecewiseConstant {
                breakpoints,
                values,
                axis,
            } => {
                if *axis >= dim {
                    return Err(Error::validation(format!("{key}.axis"), "axis out of range"));
                }
                if values.len() != breakpoints.len() + 1 {
                    return Err(Error::validation(
                        format!("{key}.values"),
                        "need exactly one more value than breakpoints",
                    ));
                }
                let sorted = breakpoints.windows(2).all(|w| w[0] < w[1]);
                let inside = breakpoints.iter().all(|&b| b > 0.0 && b < 1.0);
                if !sorted || !inside {
                    return Err(Error::validation(
                        format!("{key}.breakpoints"),
                        "must be strictly increasing inside (0, 1)",
                    ));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::validation(format!("{key}.values"), "must be finite"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Point samples of `spec` on the cell grid. `name` labels the coefficient
/// in the error raised when `positive` is requested and a sample is not.
pub fn sample_coefficient(
    spec: &CoefficientSpec,
    grid: CellGrid,
    name: &str,
    positive: bool,
) -> Result<CellField> {
    let field = Field::from_fn(grid, |p| spec.eval(p));
    if positive {
        if let Some(i) = field.values().iter().position(|&v| !(v > 0.0)) {
            let p = grid.point(i);
            return Err(Error::validation(
                name,
                format!(
                    "coefficient `{name}` must be strictly positive, got {} at x = {:?}",
                    field.values()[i],
                    &p[..grid.dim()]
                ),
            ));
        }
    }
    Ok(field)
}

/// Compactly supported initial infection `height·cos²(π|x−c|/(2·radius))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bump {
    pub center: Vec<f64>,
    pub radius: f64,
    pub height: f64,
}

impl Bump {
    pub fn eval(&self, x: [f64; 2]) -> f64 {
        let r = self
            .center
            .iter()
            .zip(x)
            .map(|(c, xi)| (xi - c).powi(2))
            .sum::<f64>()
            .sqrt();
        if r >= self.radius {
            0.0
        } else {
            self.height * (PI * r / (2.0 * self.radius)).cos().powi(2)
        }
    }
}

/// The scenario's coefficients sampled on its cell grid.
#[derive(Debug, Clone)]
pub struct CellCoefficients {
    pub d: f64,
    pub alpha: CellField,
    pub mu: CellField,
    pub lambda: CellField,
    pub s0: CellField,
}

impl CellCoefficients {
    pub fn grid(&self) -> CellGrid {
        *self.alpha.grid()
    }
}

/// `γ*`, `M = ⨍S₀` and the explicit thresholds derived from them.
#[derive(Debug, Clone)]
pub struct DerivedCoefficients {
    pub gamma_star: CellField,
    pub m: f64,
    /// `None` when `γ*` is not positive everywhere.
    pub lambda0: Option<f64>,
    /// `None` when the contraction hypothesis fails.
    pub c_taz_bound: Option<f64>,
}

/// `γ*(x) = α(x)·M − μ(x)` with `M` the cell average of the sampled `S₀`.
pub fn gamma_star(scenario: &Scenario) -> Result<DerivedCoefficients> {
    let coeffs = scenario.cell_coefficients()?;
    let (gamma_star, m) = gamma_star_from(&coeffs);
    Ok(DerivedCoefficients {
        gamma_star,
        m,
        lambda0: lambda0(scenario).ok(),
        c_taz_bound: c_taz_bound(scenario).ok(),
    })
}

pub fn gamma_star_from(coeffs: &CellCoefficients) -> (CellField, f64) {
    let m = coeffs.s0.mean();
    let g = coeffs.alpha.zip_with(&coeffs.mu, |a, mu| a * m - mu);
    (g, m)
}

struct Extrema {
    alpha_max: f64,
    alpha_min: f64,
    mu_max: f64,
    lambda_min: f64,
    ratio_max: f64,
    ratio_min: f64,
    mu_over_lambda_max: f64,
}

fn extrema(coeffs: &CellCoefficients) -> Extrema {
    let (g, _) = gamma_star_from(coeffs);
    let ratio = g.zip_with(&coeffs.alpha, |g, a| g / a);
    Extrema {
        alpha_max: coeffs.alpha.max(),
        alpha_min: coeffs.alpha.min(),
        mu_max: coeffs.mu.max(),
        lambda_min: coeffs.lambda.min(),
        ratio_max: ratio.max(),
        ratio_min: ratio.min(),
        mu_over_lambda_max: coeffs.mu.zip_with(&coeffs.lambda, |m, l| m / l).max(),
    }
}

/// `Λ₀ = max μ · max(γ*/α) / min(γ*/α) · (max α / min α + 1)`.
pub fn lambda0(scenario: &Scenario) -> Result<f64> {
    lambda0_from(&scenario.cell_coefficients()?)
}

pub fn lambda0_from(coeffs: &CellCoefficients) -> Result<f64> {
    let (g, _) = gamma_star_from(coeffs);
    if g.min() <= 0.0 {
        return Err(Error::Inapplicable(
            "Λ₀ inapplicable: γ* not positive".to_string(),
        ));
    }
    let e = extrema(coeffs);
    Ok(e.mu_max * e.ratio_max / e.ratio_min * (e.alpha_max / e.alpha_min + 1.0))
}

/// Lipschitz constant of `T∘A∘Z` on the invariant set. Homogeneous
/// scenarios get the sharp value `μ/λ`.
pub fn c_taz_bound(scenario: &Scenario) -> Result<f64> {
    let coeffs = scenario.cell_coefficients()?;
    let homogeneous = [&scenario.alpha, &scenario.mu, &scenario.lambda, &scenario.s0]
        .iter()
        .all(|c| c.as_constant().is_some());
    c_taz_bound_from(&coeffs, homogeneous)
}

pub fn c_taz_bound_from(coeffs: &CellCoefficients, homogeneous: bool) -> Result<f64> {
    let e = extrema(coeffs);
    let margin = e.ratio_min - e.mu_over_lambda_max * e.ratio_max;
    if !(e.ratio_min > 0.0 && margin > 0.0) {
        return Err(Error::Inapplicable(format!(
            "contraction bound unavailable: min(γ*/α) = {:.6} does not exceed max(μ/λ)·max(γ*/α) = {:.6}",
            e.ratio_min,
            e.mu_over_lambda_max * e.ratio_max
        )));
    }
    if homogeneous {
        return Ok(e.mu_over_lambda_max);
    }
    Ok(e.alpha_max * e.ratio_max * e.mu_max / (e.alpha_min * e.lambda_min * margin))
}

/// Half-width that keeps a front of speed `speed` inside the box up to
/// `t_final`: `(speed + 1)·t_final + radius + 5`.
pub fn recommended_half_width(speed: f64, t_final: f64, radius: f64) -> f64 {
    (speed + 1.0) * t_final + radius + 5.0
}
