//! Principal periodic eigenpairs of `−dΔ − γ` and of the drifted operator
//! `L_ρ ψ = −dΔψ + 2dρ·∇ψ − (d|ρ|² + γ)ψ` on the unit cell.
//!
//! The principal pair is reached by power iteration on the positive
//! resolvent `(L − σ)⁻¹`, `σ` below the spectrum. The resolvent is the
//! Laplace transform of the positive semigroup `e^{−tL}`, so it shares the
//! principal eigenvector and keeps iterates positive even when `L` is not
//! symmetric. Collatz–Wielandt ratios bracket the eigenvalue at each step
//! and let the shift move up towards it, which speeds convergence up
//! without ever crossing the principal eigenvalue.
//!
//! Eigenfunctions are normalized to `sup = 1`. This is a convention; any
//! positive multiple is an eigenfunction too.

use crate::error::{Error, Result};
use crate::grids::{cell_inner, dirichlet_energy, CellField, CellOperator, Field, Lattice};
use crate::scenario::Tolerances;

#[derive(Debug, Clone, Copy)]
pub struct EigenSettings {
    pub tol: f64,
    pub residual_tol: f64,
    pub max_iter: usize,
    pub linear_tol: f64,
}

impl Default for EigenSettings {
    fn default() -> Self {
        (&Tolerances::default()).into()
    }
}

impl From<&Tolerances> for EigenSettings {
    fn from(t: &Tolerances) -> Self {
        Self {
            tol: t.eigen,
            residual_tol: t.eigen_residual,
            max_iter: t.eigen_max_iter,
            linear_tol: t.linear,
        }
    }
}

/// Principal eigenvalue with its positive eigenfunction.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub eigenvalue: f64,
    /// Strictly positive, `sup = 1`.
    pub eigenfunction: CellField,
    /// `sup |(L − eigenvalue) eigenfunction|`.
    pub residual: f64,
    pub iterations: usize,
}

/// Smallest eigenvalue `λ₁(−dΔ − γ)` and its positive eigenfunction.
pub fn principal_eigenpair(gamma: &CellField, d: f64, settings: &EigenSettings) -> Result<EigenResult> {
    drifted_principal_eigenvalue(gamma, d, &[], settings, None)
}

/// Principal eigenvalue `k(ρ)` of `L_ρ`. `warm` seeds the iteration with a
/// previous eigenfunction (e.g. from a nearby `ρ`).
pub fn drifted_principal_eigenvalue(
    gamma: &CellField,
    d: f64,
    rho: &[f64],
    settings: &EigenSettings,
    warm: Option<&CellField>,
) -> Result<EigenResult> {
    if !(d > 0.0) {
        return Err(Error::validation("d", "diffusivity must be positive"));
    }
    let grid = *gamma.grid();
    let dim = grid.dim();
    let mut drift = [0.0; 2];
    for (slot, r) in drift.iter_mut().zip(rho.iter().take(dim)) {
        *slot = *r;
    }
    let rho2: f64 = drift.iter().map(|r| r * r).sum();
    let base: Vec<f64> = gamma.values().iter().map(|g| -(d * rho2 + g)).collect();
    let drift_coeff = [2.0 * d * drift[0], 2.0 * d * drift[1]];
    let operator = CellOperator::new(grid, d, &drift_coeff, base.clone());

    let sup_gamma = gamma.sup_norm();
    let tau = 0.1 / (1.0 + sup_gamma + d * rho2);
    let mut shift = -(sup_gamma + d * rho2) - 1.0 / tau;

    let mut phi: Vec<f64> = match warm {
        Some(w) if w.values().len() == grid.len() && w.min() > 0.0 => {
            let s = w.max();
            w.values().iter().map(|v| v / s).collect()
        }
        _ => vec![1.0; grid.len()],
    };
    let mut psi = phi.clone();
    let mut l_phi = vec![0.0; grid.len()];
    let mut previous = f64::NAN;
    let mut estimate = f64::NAN;
    let mut residual = f64::INFINITY;
    // Krylov solves get slower as the shift approaches the spectrum.
    let margin_floor = if dim == 1 { 1e-2 } else { 1e-1 };

    for it in 1..=settings.max_iter {
        let shifted: Vec<f64> = base.iter().map(|c| c - shift).collect();
        let resolvent = CellOperator::new(grid, d, &drift_coeff, shifted);
        resolvent.solve(&phi, &mut psi, settings.linear_tol * 1e-2)?;

        let (mut q_min, mut q_max) = (f64::INFINITY, 0.0f64);
        for (p, f) in psi.iter().zip(&phi) {
            if *f > 0.0 {
                let q = p / f;
                q_min = q_min.min(q);
                q_max = q_max.max(q);
            }
        }
        let scale = psi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Positivity(format!(
                "resolvent iterate lost positivity at iteration {it} (shift {shift:.6e})"
            )));
        }
        for (f, p) in phi.iter_mut().zip(&psi) {
            *f = (p / scale).max(0.0);
        }

        operator.apply(&phi, &mut l_phi);
        let num: f64 = phi.iter().zip(&l_phi).map(|(a, b)| a * b).sum();
        let den: f64 = phi.iter().map(|a| a * a).sum();
        estimate = num / den;
        residual = l_phi
            .iter()
            .zip(&phi)
            .map(|(l, f)| (l - estimate * f).abs())
            .fold(0.0, f64::max);

        if (estimate - previous).abs() < settings.tol && residual < settings.residual_tol {
            if phi.iter().any(|&v| v <= 0.0) {
                return Err(Error::Positivity(
                    "principal eigenfunction is not strictly positive on the grid".into(),
                ));
            }
            return Ok(EigenResult {
                eigenvalue: estimate,
                eigenfunction: Field::from_raw(grid, phi),
                residual,
                iterations: it,
            });
        }
        previous = estimate;

        if q_min > 0.0 && q_max.is_finite() {
            let lower = shift + 1.0 / q_max;
            let upper = shift + 1.0 / q_min;
            let margin = (0.5 * (upper - lower)).max(margin_floor * (1.0 + lower.abs()));
            let candidate = lower.min(estimate) - margin;
            if candidate > shift {
                shift = candidate;
            }
        }
        psi.iter_mut().for_each(|v| *v /= scale);
    }
    Err(Error::NoConvergence {
        what: "principal eigenpair",
        iterations: settings.max_iter,
        estimate,
        residual,
    })
}

/// `(∫ d|∇φ|² − γφ²) / ∫ φ²` with the one-sided discrete gradient, which is
/// the quadratic form of the discrete `−dΔ − γ`.
pub fn rayleigh_quotient(gamma: &CellField, d: f64, phi: &CellField) -> Result<f64> {
    let den = cell_inner(phi, phi);
    if den == 0.0 {
        return Err(Error::validation("phi", "test function vanishes identically"));
    }
    let potential = cell_inner(&gamma.zip_with(phi, |g, p| g * p), phi);
    Ok((d * dirichlet_energy(phi) - potential) / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grids::CellGrid;
    use std::f64::consts::PI;

    fn settings() -> EigenSettings {
        EigenSettings::default()
    }

    fn het_gamma(res: usize) -> CellField {
        Field::from_fn(CellGrid::new(1, res).unwrap(), |p| 1.0 - 0.5 * (2.0 * PI * p[0]).cos())
    }

    #[test]
    fn constant_potential() {
        for (c, d) in [(1.0, 1.0), (-0.3, 4.0), (2.5, 0.1)] {
            let g = Field::constant(CellGrid::new(1, 64).unwrap(), c);
            let r = principal_eigenpair(&g, d, &settings()).unwrap();
            assert!((r.eigenvalue + c).abs() < 1e-8, "{c} {d}: {}", r.eigenvalue);
            assert!((r.eigenfunction.max() - 1.0).abs() == 0.0);
        }
        let zero = Field::constant(CellGrid::new(2, 16).unwrap(), 0.0);
        let r = principal_eigenpair(&zero, 1.0, &settings()).unwrap();
        assert!(r.eigenvalue.abs() < 1e-10);
    }

    #[test]
    fn drifted_constant_potential() {
        let g = Field::constant(CellGrid::new(1, 64).unwrap(), 1.5);
        for rho in [0.3, -1.0, 4.0] {
            let r = drifted_principal_eigenvalue(&g, 0.7, &[rho], &settings(), None).unwrap();
            assert!((r.eigenvalue + 0.7 * rho * rho + 1.5).abs() < 1e-8);
        }
        let g2 = Field::constant(CellGrid::new(2, 16).unwrap(), 1.0);
        let r = drifted_principal_eigenvalue(&g2, 1.0, &[0.6, 0.8], &settings(), None).unwrap();
        assert!((r.eigenvalue + 2.0).abs() < 1e-8);
    }

    #[test]
    fn heterogeneous_matches_frozen_dense_value() {
        // dense eigendecomposition of the 128-point stencil matrix
        let r = principal_eigenpair(&het_gamma(128), 1.0, &settings()).unwrap();
        assert!((r.eigenvalue - (-1.003166700538715)).abs() < 1e-8, "{}", r.eigenvalue);
        assert!(r.residual <= 1e-7);
        assert!(r.eigenfunction.min() > 0.0);
        let k1 = drifted_principal_eigenvalue(&het_gamma(128), 1.0, &[1.0], &settings(), None)
            .unwrap();
        assert!((k1.eigenvalue - (-2.002875522656292)).abs() < 1e-8, "{}", k1.eigenvalue);
    }

    #[test]
    fn drift_zero_reduces_to_symmetric_problem() {
        let g = het_gamma(64);
        let a = principal_eigenpair(&g, 1.0, &settings()).unwrap();
        let b = drifted_principal_eigenvalue(&g, 1.0, &[0.0], &settings(), None).unwrap();
        assert!((a.eigenvalue - b.eigenvalue).abs() < 1e-8);
    }

    #[test]
    fn rayleigh_quotient_examples() {
        let grid = CellGrid::new(1, 256).unwrap();
        let ones = Field::constant(grid, 1.0);
        let c = Field::constant(grid, 0.7);
        assert!((rayleigh_quotient(&c, 2.0, &ones).unwrap() + 0.7).abs() < 1e-14);

        let phi = Field::from_fn(grid, |p| 1.0 + 0.1 * (2.0 * PI * p[0]).cos());
        let zero = Field::constant(grid, 0.0);
        let rq = rayleigh_quotient(&zero, 1.0, &phi).unwrap();
        let analytic = (2.0 * PI).powi(2) * 0.005 / 1.005;
        assert!((rq - analytic).abs() / analytic < 1e-3, "{rq} vs {analytic}");
        assert!((analytic - 0.1964).abs() < 1e-4);

        let g = het_gamma(128);
        let r = principal_eigenpair(&g, 1.0, &settings()).unwrap();
        let rq = rayleigh_quotient(&g, 1.0, &r.eigenfunction).unwrap();
        assert!((rq - r.eigenvalue).abs() < 10.0 * 1e-7, "{rq} vs {}", r.eigenvalue);

        assert!(rayleigh_quotient(&g, 1.0, &Field::zeros(*g.grid())).is_err());
    }

    #[test]
    fn two_dimensional_heterogeneous() {
        let grid = CellGrid::new(2, 24).unwrap();
        let g = Field::from_fn(grid, |p| {
            1.0 - 0.5 * (2.0 * PI * p[0]).cos() + 0.3 * (2.0 * PI * p[1]).sin()
        });
        let r = principal_eigenpair(&g, 1.0, &settings()).unwrap();
        let rq = rayleigh_quotient(&g, 1.0, &r.eigenfunction).unwrap();
        assert!((rq - r.eigenvalue).abs() < 1e-6);
        let k = drifted_principal_eigenvalue(&g, 1.0, &[0.5, -0.2], &settings(), None).unwrap();
        assert!(k.eigenfunction.min() > 0.0);
        assert!(k.residual < 1e-7);
    }
}
