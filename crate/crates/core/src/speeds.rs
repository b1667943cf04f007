//! Directional spreading speeds
//!
//! ```text
//! w(e) = inf_{ρ·e > 0} −k(ρ)/(ρ·e)
//! ```
//!
//! where `k(ρ)` is the principal eigenvalue of the drifted operator `L_ρ`.
//! By default `ρ` runs over the ray `r·e`, `r > 0`: a log-spaced scan
//! brackets the minima of `g(r) = −k(r·e)/r` and golden-section search
//! refines each bracket. In 2D an optional Nelder–Mead descent minimizes
//! over the half plane `ρ·e > 0`.

use rayon::prelude::*;

use crate::eigen::{drifted_principal_eigenvalue, principal_eigenpair, EigenSettings};
use crate::error::{Error, Result};
use crate::grids::{CellField, Lattice};
use crate::scenario::Scenario;
use crate::stationary::{compute_barriers, StationaryProblem};

/// Scan range and size for `r`.
pub const SCAN_MIN: f64 = 1e-2;
pub const SCAN_MAX: f64 = 1e2;
pub const SCAN_POINTS: usize = 40;

#[derive(Debug, Clone, Copy)]
pub struct SpeedSettings {
    pub eigen: EigenSettings,
    /// Relative width at which golden-section refinement stops.
    pub rel_tol: f64,
    /// Minimize over the half plane instead of the ray (2D only).
    pub full_minimization: bool,
}

impl SpeedSettings {
    pub fn from_scenario(s: &Scenario) -> Self {
        Self {
            eigen: (&s.tolerances).into(),
            rel_tol: s.tolerances.speed,
            full_minimization: s.speed.full_minimization,
        }
    }
}

impl Default for SpeedSettings {
    fn default() -> Self {
        Self {
            eigen: EigenSettings::default(),
            rel_tol: 1e-5,
            full_minimization: false,
        }
    }
}

/// One point of the coarse scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub r: f64,
    pub k: f64,
    /// `−k(r·e)/r`.
    pub g: f64,
}

#[derive(Debug, Clone)]
pub struct SpeedResult {
    /// Unit direction.
    pub direction: Vec<f64>,
    pub speed: f64,
    /// Minimizing `ρ`; `ρ·e > 0`.
    pub rho: Vec<f64>,
    pub k_at_rho: f64,
    pub scan: Vec<ScanPoint>,
    /// Number of local minima of the scan that were refined.
    pub brackets: usize,
    /// Eigenvalue solves spent, scan included.
    pub evaluations: usize,
}

impl SpeedResult {
    /// `ρ·e` of the minimizer.
    pub fn rho_dot_e(&self) -> f64 {
        dot(&self.rho, &self.direction)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `2√(dγ̄)`.
pub fn homogeneous_speed(d: f64, gamma_bar: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::validation("d", "diffusivity must be positive"));
    }
    if !(gamma_bar > 0.0) {
        return Err(Error::Inapplicable(format!(
            "homogeneous speed needs a positive growth rate, got {gamma_bar}"
        )));
    }
    Ok(2.0 * (d * gamma_bar).sqrt())
}

/// Log-spaced scan points `r_j`.
pub fn scan_radii() -> Vec<f64> {
    let (a, b) = (SCAN_MIN.log10(), SCAN_MAX.log10());
    (0..SCAN_POINTS)
        .map(|j| 10f64.powf(a + (b - a) * j as f64 / (SCAN_POINTS - 1) as f64))
        .collect()
}

struct Objective<'a> {
    gamma: &'a CellField,
    d: f64,
    settings: &'a EigenSettings,
    warm: Option<CellField>,
    evaluations: usize,
}

impl Objective<'_> {
    /// `k(ρ)`, warm-started from the previous eigenfunction.
    fn k(&mut self, rho: &[f64]) -> Result<f64> {
        let res = drifted_principal_eigenvalue(self.gamma, self.d, rho, self.settings, self.warm.as_ref())?;
        self.evaluations += 1;
        self.warm = Some(res.eigenfunction);
        Ok(res.eigenvalue)
    }
}

fn ray(e: &[f64], r: f64) -> Vec<f64> {
    e.iter().map(|c| c * r).collect()
}

/// Golden-section minimization of `g` on `[a, b]`, stopping at relative
/// width `rel_tol`. Returns `(r, g(r), k(r))`.
fn golden_section(
    obj: &mut Objective,
    e: &[f64],
    mut a: f64,
    mut b: f64,
    rel_tol: f64,
) -> Result<(f64, f64, f64)> {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let eval = |obj: &mut Objective, r: f64| -> Result<(f64, f64)> {
        let k = obj.k(&ray(e, r))?;
        Ok((-k / r, k))
    };
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = eval(obj, x1)?;
    let mut f2 = eval(obj, x2)?;
    while b - a > rel_tol * 0.5 * (a + b) {
        if f1.0 <= f2.0 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = eval(obj, x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = eval(obj, x2)?;
        }
    }
    Ok(if f1.0 <= f2.0 { (x1, f1.0, f1.1) } else { (x2, f2.0, f2.1) })
}

/// Nelder–Mead on `ρ ↦ −k(ρ)/(ρ·e)` over `ρ·e > 0`, started at `start`.
fn nelder_mead(obj: &mut Objective, e: &[f64], start: &[f64], rel_tol: f64) -> Result<(Vec<f64>, f64, f64)> {
    let n = start.len();
    let f = |obj: &mut Objective, rho: &[f64]| -> Result<(f64, f64)> {
        let re = dot(rho, e);
        if re <= 0.0 {
            return Ok((f64::INFINITY, f64::NAN));
        }
        let k = obj.k(rho)?;
        Ok((-k / re, k))
    };
    let scale = 0.1 * start.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-2);
    let mut simplex: Vec<(Vec<f64>, (f64, f64))> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), f(obj, start)?));
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += scale;
        let v = f(obj, &p)?;
        simplex.push((p, v));
    }
    for _ in 0..400 {
        simplex.sort_by(|a, b| a.1 .0.total_cmp(&b.1 .0));
        let (best, worst) = (simplex[0].1 .0, simplex[n].1 .0);
        if (worst - best).abs() <= rel_tol * best.abs() * 1e-2 {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|i| simplex[..n].iter().map(|p| p.0[i]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            (0..n).map(|i| centroid[i] + t * (simplex[n].0[i] - centroid[i])).collect()
        };
        let xr = along(-1.0);
        let fr = f(obj, &xr)?;
        if fr.0 < simplex[0].1 .0 {
            let xe = along(-2.0);
            let fe = f(obj, &xe)?;
            simplex[n] = if fe.0 < fr.0 { (xe, fe) } else { (xr, fr) };
        } else if fr.0 < simplex[n - 1].1 .0 {
            simplex[n] = (xr, fr);
        } else {
            let xc = if fr.0 < worst { along(-0.5) } else { along(0.5) };
            let fc = f(obj, &xc)?;
            if fc.0 < worst.min(fr.0) {
                simplex[n] = (xc, fc);
            } else {
                let best_point = simplex[0].0.clone();
                for j in 1..=n {
                    let p: Vec<f64> = (0..n)
                        .map(|i| best_point[i] + 0.5 * (simplex[j].0[i] - best_point[i]))
                        .collect();
                    let v = f(obj, &p)?;
                    simplex[j] = (p, v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1 .0.total_cmp(&b.1 .0));
    let (rho, (g, k)) = simplex.swap_remove(0);
    Ok((rho, g, k))
}

/// Speed in direction `e` for the growth rate `gamma`.
pub fn fg_speed(gamma: &CellField, d: f64, e: &[f64], settings: &SpeedSettings) -> Result<SpeedResult> {
    let dim = gamma.grid().dim();
    if e.len() != dim {
        return Err(Error::validation(
            "speed.directions",
            format!("direction has {} components, expected {dim}", e.len()),
        ));
    }
    let norm = e.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::validation("speed.directions", "direction must be non-zero"));
    }
    let e: Vec<f64> = e.iter().map(|v| v / norm).collect();

    let lambda1 = principal_eigenpair(gamma, d, &settings.eigen)?.eigenvalue;
    if lambda1 >= 0.0 {
        return Err(Error::NoPositiveSpeed { lambda1 });
    }

    let scan = scan_radii()
        .into_par_iter()
        .map(|r| {
            let k = drifted_principal_eigenvalue(gamma, d, &ray(&e, r), &settings.eigen, None)?.eigenvalue;
            Ok(ScanPoint { r, k, g: -k / r })
        })
        .collect::<Result<Vec<_>>>()?;
    let table = || scan.iter().map(|p| (p.r, p.g)).collect::<Vec<_>>();

    let global = (0..scan.len())
        .min_by(|&a, &b| scan[a].g.total_cmp(&scan[b].g))
        .expect("non-empty scan");
    if global == 0 || global == scan.len() - 1 {
        return Err(Error::Unbracketed { table: table() });
    }
    let minima: Vec<usize> = (1..scan.len() - 1)
        .filter(|&j| scan[j].g <= scan[j - 1].g && scan[j].g <= scan[j + 1].g)
        .collect();

    let mut obj = Objective {
        gamma,
        d,
        settings: &settings.eigen,
        warm: None,
        evaluations: scan.len(),
    };
    let mut best: Option<(f64, f64, f64)> = None;
    for &j in &minima {
        let found = golden_section(&mut obj, &e, scan[j - 1].r, scan[j + 1].r, settings.rel_tol)?;
        if best.is_none_or(|b| found.1 < b.1) {
            best = Some(found);
        }
    }
    let (r, mut speed, mut k) = best.ok_or_else(|| Error::Unbracketed { table: table() })?;
    let mut rho = ray(&e, r);

    if settings.full_minimization && dim == 2 {
        let (p, g, kk) = nelder_mead(&mut obj, &e, &rho, settings.rel_tol)?;
        if g < speed {
            rho = p;
            speed = g;
            k = kk;
        }
    }
    if !(speed > 0.0) {
        return Err(Error::NoPositiveSpeed { lambda1 });
    }
    Ok(SpeedResult {
        direction: e,
        speed,
        rho,
        k_at_rho: k,
        scan,
        brackets: minima.len(),
        evaluations: obj.evaluations,
    })
}

/// Lower and upper speed in one direction.
#[derive(Debug, Clone)]
pub struct DirectionalSpeeds {
    /// From `γ* − αR̄`.
    pub lower: SpeedResult,
    /// From `γ*`.
    pub upper: SpeedResult,
}

#[derive(Debug, Clone)]
pub struct SpeedPair {
    pub directions: Vec<DirectionalSpeeds>,
    /// `λ₁(−dΔ − γ*)`.
    pub lambda1: f64,
    /// `λ₁(−dΔ − (γ* − αR̄))`.
    pub lambda1_reduced: f64,
}

/// Growth rate of the lower speed, `γ* − αR̄`.
pub fn reduced_growth(problem: &StationaryProblem, r_bar: &CellField) -> CellField {
    let ar = problem.coeffs.alpha.zip_with(r_bar, |a, r| a * r);
    problem.gamma_star.zip_with(&ar, |g, ar| g - ar)
}

/// `(w_*, w^*)` for every configured direction.
pub fn speed_pair(scenario: &Scenario) -> Result<SpeedPair> {
    let problem = StationaryProblem::new(scenario)?;
    let barriers = compute_barriers(&problem)?;
    if !barriers.assumption1_holds {
        return Err(Error::NoPositiveSpeed {
            lambda1: barriers.lambda1,
        });
    }
    let lower_gamma = reduced_growth(&problem, &barriers.r_bar);
    let settings = SpeedSettings::from_scenario(scenario);
    let d = problem.coeffs.d;
    let directions = scenario
        .directions()
        .par_iter()
        .map(|e| {
            Ok(DirectionalSpeeds {
                lower: fg_speed(&lower_gamma, d, e, &settings)?,
                upper: fg_speed(&problem.gamma_star, d, e, &settings)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpeedPair {
        directions,
        lambda1: barriers.lambda1,
        lambda1_reduced: barriers.lambda1_reduced,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grids::{CellGrid, Field};
    use crate::scenario::presets;
    use std::f64::consts::PI;

    fn cell(res: usize) -> CellGrid {
        CellGrid::new(1, res).unwrap()
    }

    #[test]
    fn constant_growth() {
        let s = SpeedSettings::default();
        for (g, w, r) in [(1.0, 2.0, 1.0), (4.0, 4.0, 2.0)] {
            let res = fg_speed(&Field::constant(cell(64), g), 1.0, &[1.0], &s).unwrap();
            assert!((res.speed - w).abs() < 1e-8, "{}", res.speed);
            assert!((res.rho[0] - r).abs() < 1e-3);
            assert!((-res.k_at_rho / res.rho_dot_e() - res.speed).abs() < 1e-12);
        }
    }

    #[test]
    fn heterogeneous_matches_grid_scan() {
        let gamma = Field::from_fn(cell(128), |x| 1.0 - 0.5 * (2.0 * PI * x[0]).cos());
        let s = SpeedSettings::default();
        for e in [1.0, -1.0] {
            let res = fg_speed(&gamma, 1.0, &[e], &s).unwrap();
            assert!((res.speed - 2.002872642522).abs() < 1e-6, "{}", res.speed);
            assert!(res.rho_dot_e() > 0.0);
        }
    }

    #[test]
    fn homogeneous_closed_form() {
        assert_eq!(homogeneous_speed(1.0, 1.0).unwrap(), 2.0);
        assert!((homogeneous_speed(1.0, 0.8).unwrap() - 1.788854381999).abs() < 1e-11);
        assert_eq!(homogeneous_speed(4.0, 1.0).unwrap(), 4.0);
        assert!(homogeneous_speed(1.0, 0.0).is_err());
    }

    #[test]
    fn pair_homogeneous() {
        let pair = speed_pair(&presets::hom1()).unwrap();
        for dir in &pair.directions {
            assert!((dir.upper.speed - 2.0).abs() < 1e-6);
            assert!((dir.lower.speed - 2.0 * 0.8f64.sqrt()).abs() < 1e-6);
        }
        let pair = speed_pair(&presets::homogeneous(1.0, 1.0, 1.0, 1e6, 2.0)).unwrap();
        let dir = &pair.directions[0];
        assert!((dir.upper.speed - dir.lower.speed).abs() < 1e-3);
    }

    #[test]
    fn no_speed_when_disease_free() {
        let err = speed_pair(&presets::ext1()).unwrap_err();
        assert!(err.to_string().starts_with("no positive speed"), "{err}");
    }

    #[test]
    fn full_minimization_in_two_dimensions() {
        let grid = CellGrid::new(2, 32).unwrap();
        let gamma = Field::from_fn(grid, |x| 1.0 + 0.3 * (2.0 * PI * x[0]).cos());
        let e = [FRAC, FRAC];
        let ray = fg_speed(&gamma, 1.0, &e, &SpeedSettings::default()).unwrap();
        let full = fg_speed(
            &gamma,
            1.0,
            &e,
            &SpeedSettings {
                full_minimization: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(full.speed <= ray.speed + 1e-12);
        assert!(full.rho_dot_e() > 0.0);
    }

    const FRAC: f64 = std::f64::consts::FRAC_1_SQRT_2;
}
