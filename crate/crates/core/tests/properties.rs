//! Structural properties of the discrete operators and of the stationary,
//! speed and evolution pipelines.

mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use sirs::eigen::{principal_eigenpair, EigenSettings};
use sirs::grids::{apply_laplacian, cell_average, cell_inner, CellField, CellGrid, Field};
use sirs::scenario::presets;
use sirs::speeds::{fg_speed, homogeneous_speed, SpeedSettings};
use sirs::stationary::{fixed_point, StationaryProblem};
use sirs::Scenario;

fn cosine_field(res: usize, c: [f64; 4]) -> CellField {
    Field::from_fn(CellGrid::new(1, res).unwrap(), |x| {
        let t = 2.0 * PI * x[0];
        c[0] + c[1] * t.cos() + c[2] * t.sin() + c[3] * (2.0 * t).cos()
    })
}

fn shifted(f: &CellField, by: usize) -> CellField {
    let v = f.values();
    let n = v.len();
    Field::from_values(*f.grid(), (0..n).map(|k| v[(k + by) % n]).collect()).unwrap()
}

fn coeffs() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-1.0f64..1.0)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn laplacian_commutes_with_shifts(c in coeffs(), by in 0usize..64) {
        let u = cosine_field(64, c);
        let a = apply_laplacian(&shifted(&u, by));
        let b = shifted(&apply_laplacian(&u), by);
        prop_assert!(common::sup_diff(a.values(), b.values()) < 1e-9);
    }

    #[test]
    fn laplacian_is_symmetric_with_zero_mean(c1 in coeffs(), c2 in coeffs()) {
        let (u, v) = (cosine_field(64, c1), cosine_field(64, c2));
        let (lu, lv) = (apply_laplacian(&u), apply_laplacian(&v));
        let scale = 1.0 + cell_inner(&lu, &lu).sqrt() * cell_inner(&v, &v).sqrt();
        prop_assert!((cell_inner(&lu, &v) - cell_inner(&u, &lv)).abs() < 1e-10 * scale);
        prop_assert!(cell_average(&lu).abs() < 1e-9 * (1.0 + lu.sup_norm()));
    }

    #[test]
    fn eigenvalue_shift_covariance_and_monotonicity(c in coeffs(), shift in -2.0f64..2.0, bump in 0.0f64..1.0) {
        let s = EigenSettings::default();
        let g = cosine_field(64, c);
        let base = principal_eigenpair(&g, 1.0, &s).unwrap().eigenvalue;
        let moved = principal_eigenpair(&g.map(|v| v + shift), 1.0, &s).unwrap().eigenvalue;
        prop_assert!((moved - (base - shift)).abs() < 1e-7);
        let larger = g.zip_with(&cosine_field(64, [bump, 0.0, 0.0, bump]), |a, b| a + b.abs());
        let lower = principal_eigenpair(&larger, 1.0, &s).unwrap().eigenvalue;
        prop_assert!(lower <= base + 1e-8);
    }

    #[test]
    fn constant_growth_speed_scaling(gamma in 0.1f64..3.0, d in 0.2f64..3.0) {
        let g = Field::constant(CellGrid::new(1, 32).unwrap(), gamma);
        let w = fg_speed(&g, d, &[1.0], &SpeedSettings::default()).unwrap();
        prop_assert!((w.speed - 2.0 * (d * gamma).sqrt()).abs() < 1e-5 * (1.0 + w.speed));
        prop_assert!((w.speed - homogeneous_speed(d, gamma).unwrap()).abs() < 1e-5 * (1.0 + w.speed));
    }

    #[test]
    fn scenario_toml_round_trip(s in common::random_scenario()) {
        let text = s.to_toml_string();
        let back = Scenario::from_toml_str(&text, "round-trip").unwrap();
        prop_assert_eq!(back.hash(), s.hash());
        prop_assert_eq!(back, s);
    }

    #[test]
    fn homogeneous_fixed_point_closed_form(
        alpha in 0.5f64..2.0, mu in 0.2f64..1.0, lambda in 5.0f64..30.0, s0 in 1.5f64..3.0,
    ) {
        let mut s = presets::homogeneous(1.0, alpha, mu, lambda, s0);
        s.grid.cell_resolution = 16;
        let p = StationaryProblem::new(&s).unwrap();
        prop_assume!(alpha * s0 - mu > 0.2);
        let st = fixed_point(&p).unwrap();
        let i = (alpha * s0 - mu) / (alpha * (1.0 + mu / lambda));
        let r = mu * i / lambda;
        prop_assert!((st.i_star.mean() - i).abs() < 1e-7);
        prop_assert!((st.r_star.mean() - r).abs() < 1e-7);
        prop_assert!((st.s_star.mean() - (s0 - i - r)).abs() < 1e-7);
    }
}

#[test]
fn z_monotone_and_taz_order() {
    common::suite_monotonicity(16).unwrap();
}

#[test]
fn invariant_set_is_preserved() {
    common::suite_invariance(16).unwrap();
}

#[test]
fn taz_lipschitz_bound_holds() {
    let worst = common::suite_lipschitz(50).unwrap();
    assert!(worst.is_finite());
}

#[test]
fn barrier_bounds_hold() {
    common::suite_barrier_bounds(8).unwrap();
}

#[test]
fn lower_speed_never_exceeds_upper() {
    common::suite_speed_ordering(10).unwrap();
}

#[test]
fn mass_is_conserved() {
    common::suite_mass_conservation(4).unwrap();
}

#[test]
fn kpp_solution_dominates_infected() {
    common::suite_supersolution().unwrap();
}
