//! Dense reference solvers and property suites shared by the integration
//! tests and the acceptance runner.
#![allow(dead_code, clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use sirs::coeffs::{c_taz_bound, CoefficientSpec};
use sirs::evolution::{comparison_check, simulate, simulate_reduced, ReducedOptions};
use sirs::grids::{l2_norm, Boundary, CellField, CellGrid, Field, Lattice};
use sirs::scenario::presets;
use sirs::speeds::speed_pair;
use sirs::stationary::{compute_barriers, invariant_set_check, op_taz, op_z, Barriers, StationaryProblem};
use sirs::Scenario;

/// `γ(x) = 1 − cos(2πx)/2` on a 1D cell.
pub fn het_gamma(res: usize) -> CellField {
    Field::from_fn(CellGrid::new(1, res).unwrap(), |x| 1.0 - 0.5 * (2.0 * PI * x[0]).cos())
}

/// Dense periodic `−dΔ_h + drift·∂_h + diag(c)` in 1D, centred differences.
pub fn dense_operator(res: usize, d: f64, drift: f64, c: &[f64]) -> DMatrix<f64> {
    let h = 1.0 / res as f64;
    let a = d / (h * h);
    let b = drift * 0.5 / h;
    let mut m = DMatrix::zeros(res, res);
    for i in 0..res {
        let (p, q) = ((i + 1) % res, (i + res - 1) % res);
        m[(i, i)] += 2.0 * a + c[i];
        m[(i, p)] += -a + b;
        m[(i, q)] += -a - b;
    }
    m
}

/// Smallest eigenvalue of the symmetric `−dΔ_h − γ`.
pub fn dense_lambda1(gamma: &CellField, d: f64) -> f64 {
    let c: Vec<f64> = gamma.values().iter().map(|g| -g).collect();
    let m = dense_operator(gamma.values().len(), d, 0.0, &c);
    m.symmetric_eigen().eigenvalues.min()
}

/// Whether the Z-matrix `m` is a nonsingular M-matrix: every pivot of
/// Gaussian elimination without pivoting is positive.
fn is_m_matrix(mut m: DMatrix<f64>) -> bool {
    let n = m.nrows();
    for k in 0..n {
        let pivot = m[(k, k)];
        if !(pivot > 0.0) {
            return false;
        }
        for i in k + 1..n {
            let f = m[(i, k)] / pivot;
            if f != 0.0 {
                for j in k..n {
                    m[(i, j)] -= f * m[(k, j)];
                }
            }
        }
    }
    true
}

/// Principal eigenvalue of `L_ρ` by bisection on `s`: `L_ρ − s` is a
/// nonsingular M-matrix exactly when `s < k(ρ)`, and `k(ρ)` lies between the
/// extreme row sums.
pub fn dense_k(gamma: &CellField, d: f64, rho: f64) -> f64 {
    let c: Vec<f64> = gamma.values().iter().map(|g| -(d * rho * rho + g)).collect();
    let m = dense_operator(gamma.values().len(), d, 2.0 * d * rho, &c);
    let (mut lo, mut hi) = c.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)));
    lo -= 1e-9;
    hi += 1e-9;
    while hi - lo > 1e-13 * (1.0 + hi.abs()) {
        let mid = 0.5 * (lo + hi);
        let shifted = &m - DMatrix::<f64>::identity(m.nrows(), m.nrows()) * mid;
        if is_m_matrix(shifted) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Brute-force speed: 200 log-spaced `r` in `[1e-2, 1e2]`, then a second
/// 200-point scan across the bracket of the coarse minimum.
pub fn dense_speed(gamma: &CellField, d: f64) -> (f64, f64) {
    let g = |r: f64| -dense_k(gamma, d, r) / r;
    let coarse: Vec<f64> = (0..200).map(|j| 10f64.powf(-2.0 + 4.0 * j as f64 / 199.0)).collect();
    let vals: Vec<f64> = coarse.iter().map(|&r| g(r)).collect();
    let j = (0..200).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    let (lo, hi) = (coarse[j.saturating_sub(1)], coarse[(j + 1).min(199)]);
    (0..200)
        .map(|k| lo + (hi - lo) * k as f64 / 199.0)
        .map(|r| (g(r), r))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap()
}

/// Largest solution of `−dΔu = αVu − αu²` by damped Newton from the
/// constant supersolution `max V + 1`.
pub fn newton_t(v: &[f64], alpha: &[f64], d: f64) -> Vec<f64> {
    let n = v.len();
    let lap = dense_operator(n, d, 0.0, &vec![0.0; n]);
    let start = v.iter().copied().fold(0.0, f64::max) + 1.0;
    let mut u = DVector::from_element(n, start);
    for _ in 0..200 {
        let f = &lap * &u
            + DVector::from_fn(n, |i, _| -alpha[i] * v[i] * u[i] + alpha[i] * u[i] * u[i]);
        if f.amax() < 1e-13 {
            break;
        }
        let mut j = lap.clone();
        for i in 0..n {
            j[(i, i)] += -alpha[i] * v[i] + 2.0 * alpha[i] * u[i];
        }
        let step = j.lu().solve(&f).expect("nonsingular Jacobian");
        let mut t = 1.0;
        while (0..n).any(|i| u[i] - t * step[i] <= 0.0) && t > 1e-6 {
            t *= 0.5;
        }
        u -= step * t;
    }
    u.as_slice().to_vec()
}

/// Dense solve of `(−dΔ + λ)R = μI`.
pub fn dense_z(i: &[f64], mu: &[f64], lambda: &[f64], d: f64) -> Vec<f64> {
    let m = dense_operator(i.len(), d, 0.0, lambda);
    let rhs = DVector::from_fn(i.len(), |k, _| mu[k] * i[k]);
    m.lu().solve(&rhs).unwrap().as_slice().to_vec()
}

/// Newton on the coupled stationary system for `(I, R)`:
/// `−dΔI = (γ* − αR)I − αI²`, `(−dΔ + λ)R = μI`, started from `(Ī, R̄)`.
pub fn newton_stationary(p: &StationaryProblem) -> (Vec<f64>, Vec<f64>) {
    let c = &p.coeffs;
    let n = c.alpha.values().len();
    let (a, mu, lam, g) = (c.alpha.values(), c.mu.values(), c.lambda.values(), p.gamma_star.values());
    let ratio: Vec<f64> = g.iter().zip(a).map(|(g, a)| g / a).collect();
    let i0 = newton_t(&ratio, a, c.d);
    let r0 = dense_z(&i0, mu, lam, c.d);
    let lap = dense_operator(n, c.d, 0.0, &vec![0.0; n]);
    let mut x = DVector::from_iterator(2 * n, i0.into_iter().chain(r0));
    for _ in 0..100 {
        let (i, r) = (x.rows(0, n).into_owned(), x.rows(n, n).into_owned());
        let li = &lap * &i;
        let lr = &lap * &r;
        let f = DVector::from_fn(2 * n, |k, _| {
            if k < n {
                li[k] - (g[k] - a[k] * r[k]) * i[k] + a[k] * i[k] * i[k]
            } else {
                let k = k - n;
                lr[k] + lam[k] * r[k] - mu[k] * i[k]
            }
        });
        if f.amax() < 1e-13 {
            break;
        }
        let mut j = DMatrix::zeros(2 * n, 2 * n);
        j.view_mut((0, 0), (n, n)).copy_from(&lap);
        j.view_mut((n, n), (n, n)).copy_from(&lap);
        for k in 0..n {
            j[(k, k)] += -g[k] + a[k] * r[k] + 2.0 * a[k] * i[k];
            j[(k, n + k)] += a[k] * i[k];
            j[(n + k, k)] += -mu[k];
            j[(n + k, n + k)] += lam[k];
        }
        x -= j.lu().solve(&f).unwrap();
    }
    (x.rows(0, n).as_slice().to_vec(), x.rows(n, n).as_slice().to_vec())
}

pub fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// property suites

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
    )
}

fn outcome<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>, what: &str) -> Result<(), String> {
    r.map_err(|e| format!("{what}: {e}"))
}

/// HET1 at a smaller cell resolution for the operator suites.
pub fn het1_problem() -> (StationaryProblem, Barriers) {
    let mut s = presets::het1();
    s.grid.cell_resolution = 64;
    let p = StationaryProblem::new(&s).unwrap();
    let b = compute_barriers(&p).unwrap();
    (p, b)
}

/// Smooth weights in `[0, 1]` from a few Fourier modes.
fn weights() -> impl Strategy<Value = [f64; 5]> {
    prop::array::uniform5(-1.0f64..1.0)
}

fn blend(b: &Barriers, w: &[f64; 5], offset: f64) -> CellField {
    let theta = |x: f64| {
        let s = w[0]
            + w[1] * (2.0 * PI * x).cos()
            + w[2] * (2.0 * PI * x).sin()
            + w[3] * (4.0 * PI * x).cos()
            + w[4] * (6.0 * PI * x).sin();
        (0.5 + 0.25 * s + offset).clamp(0.0, 1.0)
    };
    let grid = *b.i_bar.grid();
    let lo = b.i_under.values();
    let hi = b.i_bar.values();
    let values = (0..grid.len())
        .map(|k| lo[k] + theta(grid.point(k)[0]) * (hi[k] - lo[k]))
        .collect();
    Field::from_values(grid, values).unwrap()
}

/// Ordered pairs in the invariant set: `I₁ ≤ I₂`.
fn ordered_pair(b: Barriers) -> impl Strategy<Value = (CellField, CellField)> {
    (weights(), 0.0f64..0.5).prop_map(move |(w, gap)| (blend(&b, &w, -gap / 2.0), blend(&b, &w, gap / 2.0)))
}

const ORDER_TOL: f64 = 1e-9;

fn leq(a: &CellField, b: &CellField, tol: f64) -> bool {
    a.values().iter().zip(b.values()).all(|(x, y)| *x <= *y + tol)
}

/// `Z` preserves order, `T∘A∘Z` reverses it, `(T∘A∘Z)²` preserves it.
pub fn suite_monotonicity(cases: u32) -> Result<(), String> {
    let (p, b) = het1_problem();
    let strategy = ordered_pair(b);
    outcome(
        runner(cases).run(&strategy, |(i1, i2)| {
            prop_assert!(leq(&i1, &i2, 0.0));
            prop_assert!(leq(&op_z(&i1, &p).unwrap(), &op_z(&i2, &p).unwrap(), ORDER_TOL));
            let (t1, t2) = (op_taz(&i1, &p).unwrap(), op_taz(&i2, &p).unwrap());
            prop_assert!(leq(&t2, &t1, ORDER_TOL), "T∘A∘Z is not order reversing");
            let (u1, u2) = (op_taz(&t1, &p).unwrap(), op_taz(&t2, &p).unwrap());
            prop_assert!(leq(&u1, &u2, ORDER_TOL), "(T∘A∘Z)² is not order preserving");
            Ok(())
        }),
        "monotonicity",
    )
}

/// Random members of the invariant set map into it.
pub fn suite_invariance(cases: u32) -> Result<(), String> {
    let (p, b) = het1_problem();
    let bb = b.clone();
    outcome(
        runner(cases).run(&weights(), |w| {
            let i = blend(&bb, &w, 0.0);
            prop_assert!(invariant_set_check(&i, &bb, 1e-7));
            prop_assert!(invariant_set_check(&op_taz(&i, &p).unwrap(), &bb, 1e-7));
            Ok(())
        }),
        "invariance",
    )
}

/// `‖T∘A∘Z(I₁) − T∘A∘Z(I₂)‖ ≤ (C + 0.05)‖I₁ − I₂‖` on HET1, returning the
/// largest observed ratio.
pub fn suite_lipschitz(cases: u32) -> Result<f64, String> {
    let mut s = presets::het1();
    s.grid.cell_resolution = 64;
    let bound = c_taz_bound(&s).map_err(|e| e.to_string())? + 0.05;
    let (p, b) = het1_problem();
    let worst = std::cell::Cell::new(0.0f64);
    let strategy = (weights(), weights());
    outcome(
        runner(cases).run(&strategy, |(w1, w2)| {
            let (i1, i2) = (blend(&b, &w1, 0.0), blend(&b, &w2, 0.0));
            let den = l2_norm(&i1.zip_with(&i2, |x, y| x - y));
            prop_assume!(den > 1e-6);
            let (t1, t2) = (op_taz(&i1, &p).unwrap(), op_taz(&i2, &p).unwrap());
            let ratio = l2_norm(&t1.zip_with(&t2, |x, y| x - y)) / den;
            worst.set(worst.get().max(ratio));
            prop_assert!(ratio <= bound, "ratio {ratio} > {bound}");
            Ok(())
        }),
        "lipschitz",
    )?;
    Ok(worst.get())
}

/// Random 1D scenarios with heterogeneous recovery rate.
pub fn random_scenario() -> impl Strategy<Value = Scenario> {
    (0.5f64..2.0, 0.5f64..1.5, 0.0f64..0.4, 1.0f64..30.0, 1.0f64..3.0, 0.3f64..2.0).prop_map(
        |(alpha, mu, amp, lambda, s0, d)| {
            let mut s = presets::homogeneous(d, alpha, mu, lambda, s0);
            s.mu = CoefficientSpec::cosine_1d(mu, &[(amp * mu, 1)]);
            s.grid.cell_resolution = 64;
            s
        },
    )
}

/// Pointwise bounds on the barriers of random scenarios.
pub fn suite_barrier_bounds(cases: u32) -> Result<(), String> {
    outcome(
        runner(cases).run(&random_scenario(), |s| {
            let p = StationaryProblem::new(&s).unwrap();
            let b = compute_barriers(&p).unwrap();
            prop_assume!(b.assumption1_holds);
            let tol = 1e-8;
            let ratio = p.gamma_star.zip_with(&p.coeffs.alpha, |g, a| g / a);
            let mu_over_lambda = p.coeffs.mu.zip_with(&p.coeffs.lambda, |m, l| m / l).max();
            prop_assert!(leq(&b.i_under, &b.i_bar, tol));
            prop_assert!(b.i_bar.max() <= ratio.max() + tol);
            prop_assert!(b.r_bar.max() <= mu_over_lambda * b.i_bar.max() + tol);
            let lower = ratio.min() - mu_over_lambda * ratio.max();
            if lower > 0.0 {
                prop_assert!(b.i_under.min() >= lower - tol);
            }
            Ok(())
        }),
        "barrier bounds",
    )
}

/// `w_* ≤ w^*` on random scenarios satisfying the eigenvalue condition.
pub fn suite_speed_ordering(cases: u32) -> Result<(), String> {
    let seen = std::cell::Cell::new(0);
    let r = outcome(
        runner(cases).run(&random_scenario(), |s| {
            let p = StationaryProblem::new(&s).unwrap();
            prop_assume!(p.principal_eigenvalue(&p.gamma_star).unwrap() < -1e-3);
            let pair = speed_pair(&s).map_err(|e| TestCaseError::fail(e.to_string()))?;
            for d in &pair.directions {
                prop_assert!(d.lower.speed <= d.upper.speed * (1.0 + 2e-5));
            }
            seen.set(seen.get() + 1);
            Ok(())
        }),
        "speed ordering",
    );
    r.and_then(|()| {
        (seen.get() >= cases as usize)
            .then_some(())
            .ok_or_else(|| format!("only {} scenarios checked", seen.get()))
    })
}

fn small_run(mut s: Scenario, half_width: f64, t_final: f64) -> Scenario {
    s.grid.domain_half_width = half_width;
    s.grid.domain_step = 1.0 / 16.0;
    s.time.t_final = t_final;
    s
}

/// Relative mass drift of full runs, periodic and reflecting boundaries.
pub fn suite_mass_conservation(cases: u32) -> Result<f64, String> {
    let worst = std::cell::Cell::new(0.0f64);
    let strategy = (random_scenario(), any::<bool>());
    outcome(
        runner(cases).run(&strategy, |(s, neumann)| {
            let mut s = small_run(s, 40.0, 10.0);
            s.grid.cell_resolution = 32;
            if neumann {
                s.grid.boundary = Boundary::Neumann;
            }
            let sim = simulate(&s).map_err(|e| TestCaseError::fail(e.to_string()))?;
            worst.set(worst.get().max(sim.diagnostics.mass_drift));
            prop_assert!(sim.diagnostics.mass_drift < 1e-10);
            Ok(())
        }),
        "mass conservation",
    )?;
    Ok(worst.get())
}

/// `I ≤ ũ` at every snapshot of three reduced runs.
pub fn suite_supersolution() -> Result<(), String> {
    let runs = [
        (small_run(presets::hom1(), 80.0, 30.0), ReducedOptions::same_diffusivity(1.0)),
        (small_run(presets::ext1(), 40.0, 30.0), ReducedOptions::same_diffusivity(1.0)),
        (
            small_run(presets::het1(), 80.0, 30.0),
            ReducedOptions {
                d_i: 1.0,
                d_r: 0.2,
                couple_recovered: true,
            },
        ),
    ];
    for (s, opts) in runs {
        let run = simulate_reduced(&s, &opts).map_err(|e| e.to_string())?;
        let report = comparison_check(&run);
        if !report.holds {
            return Err(format!("{}: {report:?}", s.name.unwrap_or_default()));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// HET1 oracle agreement

/// One compared quantity.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub tol: f64,
}

impl Check {
    pub fn error(&self) -> f64 {
        (self.value - self.reference).abs()
    }

    pub fn passes(&self) -> bool {
        self.error() <= self.tol
    }
}

fn check(name: impl Into<String>, value: f64, reference: f64, tol: f64) -> Check {
    Check {
        name: name.into(),
        value,
        reference,
        tol,
    }
}

/// 20 log-spaced drift magnitudes in `[0.1, 10]`.
pub fn oracle_radii() -> Vec<f64> {
    (0..20).map(|j| 10f64.powf(-1.0 + 2.0 * j as f64 / 19.0)).collect()
}

/// Crate solvers against the dense and Newton references on HET1 at the
/// default cell resolution. Field checks compare sup-norm distances with
/// a zero reference.
pub fn het1_oracle_checks() -> Vec<Check> {
    use sirs::eigen::{drifted_principal_eigenvalue, EigenSettings};
    use sirs::stationary::fixed_point;

    const EIGEN: f64 = 1e-6;
    const SPEED: f64 = 1e-4;
    const FIELD: f64 = 1e-6;
    let s = presets::het1();
    let p = StationaryProblem::new(&s).unwrap();
    let d = p.coeffs.d;
    let g = &p.gamma_star;
    let settings = EigenSettings::from(&s.tolerances);
    let mut out = Vec::new();

    out.push(check("lambda1", p.principal_eigenvalue(g).unwrap(), dense_lambda1(g, d), EIGEN));
    for r in oracle_radii() {
        let k = drifted_principal_eigenvalue(g, d, &[r], &settings, None).unwrap().eigenvalue;
        out.push(check(format!("k({r:.4})"), k, dense_k(g, d, r), EIGEN));
    }

    let a = p.coeffs.alpha.values();
    let ratio: Vec<f64> = g.values().iter().zip(a).map(|(g, a)| g / a).collect();
    let i_bar = newton_t(&ratio, a, d);
    let r_bar = dense_z(&i_bar, p.coeffs.mu.values(), p.coeffs.lambda.values(), d);
    let reduced: Vec<f64> = ratio.iter().zip(&r_bar).map(|(v, r)| v - r).collect();
    let i_under = newton_t(&reduced, a, d);
    let lower_gamma = g.zip_with(
        &Field::from_values(*g.grid(), r_bar.iter().zip(a).map(|(r, a)| a * r).collect()).unwrap(),
        |g, ar| g - ar,
    );

    let pair = speed_pair(&s).unwrap();
    let (upper, _) = dense_speed(g, d);
    let (lower, _) = dense_speed(&lower_gamma, d);
    for dir in &pair.directions {
        let e = dir.upper.direction[0];
        out.push(check(format!("w_upper[{e:+}]"), dir.upper.speed, upper, SPEED));
        out.push(check(format!("w_lower[{e:+}]"), dir.lower.speed, lower, SPEED));
    }

    let b = compute_barriers(&p).unwrap();
    out.push(check("sup|Ī − Ī_ref|", sup_diff(b.i_bar.values(), &i_bar), 0.0, FIELD));
    out.push(check("sup|I̲ − I̲_ref|", sup_diff(b.i_under.values(), &i_under), 0.0, FIELD));

    let st = fixed_point(&p).unwrap();
    let (i_ref, r_ref) = newton_stationary(&p);
    let s_ref: Vec<f64> = i_ref.iter().zip(&r_ref).map(|(i, r)| p.m - i - r).collect();
    out.push(check("sup|I* − I*_ref|", sup_diff(st.i_star.values(), &i_ref), 0.0, FIELD));
    out.push(check("sup|R* − R*_ref|", sup_diff(st.r_star.values(), &r_ref), 0.0, FIELD));
    out.push(check("sup|S* − S*_ref|", sup_diff(st.s_star.values(), &s_ref), 0.0, FIELD));
    out
}
