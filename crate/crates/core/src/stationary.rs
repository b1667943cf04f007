//! The stationary problem as a fixed point of `T∘A∘Z`.
//!
//! * `Z(I) = R` solves `−dΔR + λR = μI`,
//! * `A(R) = γ*/α − R`,
//! * `T(V)` is the largest periodic solution of `−dΔI = αVI − αI²`.
//!
//! `T` is computed by monotone parabolic relaxation from a constant
//! supersolution, which always selects the largest solution.

use crate::coeffs::{gamma_star_from, lambda0_from, CellCoefficients};
use crate::eigen::{principal_eigenpair, EigenSettings};
use crate::error::{Error, Result};
use crate::grids::{apply_laplacian, l2_norm, CellField, CellOperator, Field, Lattice};
use crate::scenario::{Scenario, Tolerances};

/// Sampled coefficients plus `γ*` and tolerances: everything the operators
/// need.
#[derive(Debug, Clone)]
pub struct StationaryProblem {
    pub coeffs: CellCoefficients,
    pub gamma_star: CellField,
    pub m: f64,
    pub tolerances: Tolerances,
}

impl StationaryProblem {
    pub fn new(scenario: &Scenario) -> Result<Self> {
        Ok(Self::from_coefficients(
            scenario.cell_coefficients()?,
            scenario.tolerances.clone(),
        ))
    }

    pub fn from_coefficients(coeffs: CellCoefficients, tolerances: Tolerances) -> Self {
        let (gamma_star, m) = gamma_star_from(&coeffs);
        Self {
            coeffs,
            gamma_star,
            m,
            tolerances,
        }
    }

    fn eigen_settings(&self) -> EigenSettings {
        (&self.tolerances).into()
    }

    /// `λ₁(−dΔ − q)`.
    pub fn principal_eigenvalue(&self, q: &CellField) -> Result<f64> {
        Ok(principal_eigenpair(q, self.coeffs.d, &self.eigen_settings())?.eigenvalue)
    }
}

/// `Z(I)`: solves `(−dΔ + λ)R = μI` on the periodic cell.
pub fn op_z(i: &CellField, p: &StationaryProblem) -> Result<CellField> {
    let grid = *i.grid();
    let rhs = i.zip_with(&p.coeffs.mu, |i, mu| mu * i);
    let op = CellOperator::new(grid, p.coeffs.d, &[], p.coeffs.lambda.values().to_vec());
    let mut r = rhs.values().to_vec();
    op.solve(rhs.values(), &mut r, p.tolerances.linear)?;
    Ok(Field::from_raw(grid, r))
}

/// `A(R) = γ*/α − R`.
pub fn op_a(r: &CellField, p: &StationaryProblem) -> CellField {
    let ratio = p.gamma_star.zip_with(&p.coeffs.alpha, |g, a| g / a);
    ratio.zip_with(r, |q, r| q - r)
}

/// Diagnostics of one `T` evaluation.
#[derive(Debug, Clone, Copy)]
pub struct RelaxationStats {
    pub eigenvalue: f64,
    pub time: f64,
    pub steps: usize,
    /// `sup|u(t+1) − u(t)|` at the stopping time.
    pub last_change: f64,
    /// Largest pointwise increase seen over a unit of time (non-positive
    /// for a monotone trajectory, up to rounding).
    pub max_increase: f64,
}

/// `T(V)`: the largest periodic solution of `−dΔI = αVI − αI²`, zero when
/// `λ₁(−dΔ − αV) ≥ 0`.
pub fn op_t(v: &CellField, p: &StationaryProblem) -> Result<CellField> {
    op_t_with_stats(v, p).map(|(f, _)| f)
}

pub fn op_t_with_stats(v: &CellField, p: &StationaryProblem) -> Result<(CellField, RelaxationStats)> {
    let grid = *v.grid();
    let alpha = &p.coeffs.alpha;
    let growth = alpha.zip_with(v, |a, v| a * v);
    let eigenvalue = p.principal_eigenvalue(&growth)?;
    // a rounding-level negative eigenvalue has no resolvable positive solution
    if eigenvalue >= -p.tolerances.eigen * (1.0 + growth.sup_norm()) {
        return Ok((
            Field::zeros(grid),
            RelaxationStats {
                eigenvalue,
                time: 0.0,
                steps: 0,
                last_change: 0.0,
                max_increase: 0.0,
            },
        ));
    }
    let start = v.max().max(0.0) + 1.0;
    // explicit logistic term stays monotone when dt·α·(2u − V) < 1
    let dt = 0.2 / (1.0 + growth.sup_norm() + alpha.max() * start);
    let steps_per_unit = (1.0 / dt).ceil() as usize;
    let dt = 1.0 / steps_per_unit as f64;
    let diffusion = CellOperator::new(grid, p.coeffs.d * dt, &[], vec![1.0; grid.len()]);

    let a = alpha.values();
    let g = growth.values();
    let mut u = vec![start; grid.len()];
    let mut rhs = vec![0.0; grid.len()];
    let mut previous = u.clone();
    let mut time = 0.0;
    let mut steps = 0;
    let mut max_increase = f64::NEG_INFINITY;
    loop {
        for _ in 0..steps_per_unit {
            for k in 0..u.len() {
                rhs[k] = u[k] + dt * (g[k] * u[k] - a[k] * u[k] * u[k]);
            }
            diffusion.solve(&rhs, &mut u, p.tolerances.linear * 1e-2)?;
            steps += 1;
        }
        time += 1.0;
        let mut change = 0.0f64;
        for (now, before) in u.iter().zip(&previous) {
            change = change.max((now - before).abs());
            max_increase = max_increase.max(now - before);
        }
        previous.copy_from_slice(&u);
        if change < p.tolerances.relaxation {
            return Ok((
                Field::from_raw(grid, u),
                RelaxationStats {
                    eigenvalue,
                    time,
                    steps,
                    last_change: change,
                    max_increase,
                },
            ));
        }
        if time >= p.tolerances.relaxation_max_time {
            return Err(Error::NoConvergence {
                what: "T relaxation",
                iterations: steps,
                estimate: u.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                residual: change,
            });
        }
    }
}

/// `T∘A∘Z(I)`.
pub fn op_taz(i: &CellField, p: &StationaryProblem) -> Result<CellField> {
    op_t(&op_a(&op_z(i, p)?, p), p)
}

/// Upper and lower barriers of the invariant set and the two principal
/// eigenvalue conditions.
#[derive(Debug, Clone)]
pub struct Barriers {
    /// `Ī = T(γ*/α)`.
    pub i_bar: CellField,
    /// `R̄ = Z(Ī)`.
    pub r_bar: CellField,
    /// `I̲ = T∘A∘Z(Ī)`.
    pub i_under: CellField,
    /// `λ₁(−dΔ − γ*)`.
    pub lambda1: f64,
    /// `λ₁(−dΔ − (γ* − αR̄))`.
    pub lambda1_reduced: f64,
    pub assumption1_holds: bool,
    pub assumption2_holds: bool,
}

pub fn compute_barriers(p: &StationaryProblem) -> Result<Barriers> {
    let ratio = p.gamma_star.zip_with(&p.coeffs.alpha, |g, a| g / a);
    let lambda1 = p.principal_eigenvalue(&p.gamma_star)?;
    let i_bar = op_t(&ratio, p)?;
    let r_bar = op_z(&i_bar, p)?;
    let reduced = p
        .gamma_star
        .zip_with(&p.coeffs.alpha.zip_with(&r_bar, |a, r| a * r), |g, ar| g - ar);
    let lambda1_reduced = p.principal_eigenvalue(&reduced)?;
    let i_under = op_t(&op_a(&r_bar, p), p)?;
    Ok(Barriers {
        i_bar,
        r_bar,
        i_under,
        lambda1,
        lambda1_reduced,
        assumption1_holds: lambda1 < 0.0,
        assumption2_holds: lambda1_reduced < 0.0,
    })
}

/// Rounds to eight decimals and drops trailing zeros.
pub fn compact(v: f64) -> String {
    let r = (v * 1e8).round() / 1e8;
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

/// Membership in `{ I̲ ≤ I ≤ Ī }` up to `slack` pointwise.
pub fn invariant_set_check(i: &CellField, barriers: &Barriers, slack: f64) -> bool {
    i.values()
        .iter()
        .zip(barriers.i_under.values())
        .zip(barriers.i_bar.values())
        .all(|((&v, &lo), &hi)| v >= lo - slack && v <= hi + slack)
}

/// The endemic stationary state `(S*, I*, R*)` with its diagnostics.
#[derive(Debug, Clone)]
pub struct StationaryState {
    pub s_star: CellField,
    pub i_star: CellField,
    pub r_star: CellField,
    pub residual_s: f64,
    pub residual_i: f64,
    pub residual_r: f64,
    pub iterations: usize,
    /// Largest ratio of successive L² increments while they are well above
    /// the stopping tolerance.
    pub contraction_estimate: f64,
    /// L² increments `‖I_{n+1} − I_n‖`.
    pub increments: Vec<f64>,
    pub barriers: Barriers,
    /// The fixed point touches a barrier (within the membership slack).
    pub barrier_contact: bool,
    pub lambda0: Option<f64>,
    pub warnings: Vec<String>,
}

fn sup_residual(f: impl Iterator<Item = f64>) -> f64 {
    f.fold(0.0, |m, v| m.max(v.abs()))
}

/// Sup norms of the three stationary right-hand sides.
pub fn stationary_residuals(
    s: &CellField,
    i: &CellField,
    r: &CellField,
    p: &StationaryProblem,
) -> (f64, f64, f64) {
    let d = p.coeffs.d;
    let (ls, li, lr) = (apply_laplacian(s), apply_laplacian(i), apply_laplacian(r));
    let a = p.coeffs.alpha.values();
    let mu = p.coeffs.mu.values();
    let lam = p.coeffs.lambda.values();
    let (sv, iv, rv) = (s.values(), i.values(), r.values());
    let n = sv.len();
    let res_s = sup_residual(
        (0..n).map(|k| d * ls.values()[k] - a[k] * sv[k] * iv[k] + lam[k] * rv[k]),
    );
    let res_i = sup_residual(
        (0..n).map(|k| d * li.values()[k] + a[k] * sv[k] * iv[k] - mu[k] * iv[k]),
    );
    let res_r = sup_residual((0..n).map(|k| d * lr.values()[k] + mu[k] * iv[k] - lam[k] * rv[k]));
    (res_s, res_i, res_r)
}

/// Iterates `I ← T∘A∘Z(I)` from `Ī` until the L² increment drops below the
/// fixed-point tolerance, then assembles `R* = Z(I*)`, `S* = M − I* − R*`.
pub fn fixed_point(p: &StationaryProblem) -> Result<StationaryState> {
    let barriers = compute_barriers(p)?;
    if !barriers.assumption1_holds {
        return Err(Error::Inapplicable(format!(
            "assumption1 fails: λ₁ = {} ≥ 0, disease-free regime",
            compact(barriers.lambda1)
        )));
    }
    let tol = &p.tolerances;
    let mut warnings = Vec::new();
    let lambda0 = lambda0_from(&p.coeffs).ok();
    match lambda0 {
        Some(l0) if p.coeffs.lambda.min() <= l0 => warnings.push(format!(
            "min λ = {:.6} ≤ Λ₀ = {:.6}: contraction of T∘A∘Z is not guaranteed",
            p.coeffs.lambda.min(),
            l0
        )),
        None => warnings.push("Λ₀ unavailable (γ* not positive): contraction not guaranteed".into()),
        _ => {}
    }
    if !barriers.assumption2_holds {
        warnings.push(format!(
            "assumption2 fails: λ₁(−dΔ − (γ* − αR̄)) = {:.6} ≥ 0",
            barriers.lambda1_reduced
        ));
    }

    let mut current = barriers.i_bar.clone();
    let mut increments = Vec::new();
    let mut converged = false;
    for _ in 0..tol.fixed_point_max_iter {
        let next = op_taz(&current, p)?;
        let inc = l2_norm(&next.zip_with(&current, |a, b| a - b));
        increments.push(inc);
        current = next;
        if !inc.is_finite() {
            break;
        }
        if inc < tol.fixed_point {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::FixedPointStalled {
            iterations: increments.len(),
            history: increments,
        });
    }
    let i_star = current;
    let r_star = op_z(&i_star, p)?;
    let s_star = i_star
        .zip_with(&r_star, |i, r| i + r)
        .map(|ir| p.m - ir);
    if let Some(k) = s_star.values().iter().position(|&s| s <= 0.0) {
        return Err(Error::Positivity(format!(
            "S* = {:.6e} ≤ 0 at grid point {k}",
            s_star.values()[k]
        )));
    }
    if i_star.min() <= 0.0 {
        warnings.push("I* is not strictly positive: the iteration reached the trivial state".into());
    }
    let (residual_s, residual_i, residual_r) = stationary_residuals(&s_star, &i_star, &r_star, p);
    let worst = residual_s.max(residual_i).max(residual_r);
    if worst > tol.stationary_residual {
        return Err(Error::NoConvergence {
            what: "stationary residual",
            iterations: increments.len(),
            estimate: i_star.mean(),
            residual: worst,
        });
    }

    let noise_floor = 1e3 * tol.fixed_point;
    let ratios: Vec<f64> = increments
        .windows(2)
        .filter(|w| w[0] > noise_floor && w[1] > 0.0)
        .map(|w| w[1] / w[0])
        .collect();
    let contraction_estimate = ratios.iter().copied().fold(0.0, f64::max);

    let slack = tol.barrier_slack;
    let barrier_contact = i_star
        .values()
        .iter()
        .zip(barriers.i_bar.values())
        .zip(barriers.i_under.values())
        .any(|((&v, &hi), &lo)| (v - hi).abs() <= slack || (v - lo).abs() <= slack);

    Ok(StationaryState {
        s_star,
        i_star,
        r_star,
        residual_s,
        residual_i,
        residual_r,
        iterations: increments.len(),
        contraction_estimate,
        increments,
        barriers,
        barrier_contact,
        lambda0,
        warnings,
    })
}
