//! Small dense-free linear algebra: banded direct solvers for 1D stencils
//! and Krylov iterations for the 2D ones.

use crate::error::{Error, Result};

/// LU factors of a (non-cyclic) tridiagonal matrix, Thomas algorithm.
///
/// Row `i` reads `lower[i] * x[i-1] + diag[i] * x[i] + upper[i] * x[i+1]`;
/// `lower[0]` and `upper[n-1]` are ignored.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    lower: Vec<f64>,
    upper_scaled: Vec<f64>,
    pivot: Vec<f64>,
}

impl Tridiagonal {
    pub fn factor(lower: &[f64], diag: &[f64], upper: &[f64]) -> Self {
        let n = diag.len();
        assert!(n >= 1 && lower.len() == n && upper.len() == n);
        let mut upper_scaled = vec![0.0; n];
        let mut pivot = vec![0.0; n];
        pivot[0] = diag[0];
        if n > 1 {
            upper_scaled[0] = upper[0] / pivot[0];
        }
        for i in 1..n {
            pivot[i] = diag[i] - lower[i] * upper_scaled[i - 1];
            if i + 1 < n {
                upper_scaled[i] = upper[i] / pivot[i];
            }
        }
        Self {
            lower: lower.to_vec(),
            upper_scaled,
            pivot,
        }
    }

    pub fn len(&self) -> usize {
        self.pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pivot.is_empty()
    }

    /// Solves in place: `x` holds the right-hand side on entry.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.len();
        debug_assert_eq!(x.len(), n);
        x[0] /= self.pivot[0];
        for i in 1..n {
            x[i] = (x[i] - self.lower[i] * x[i - 1]) / self.pivot[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.upper_scaled[i] * x[i + 1];
        }
    }
}

/// Tridiagonal matrix with periodic corner entries, solved through
/// Sherman-Morrison on top of a Thomas factorization.
///
/// Row 0 couples to `x[n-1]` through `lower[0]`; row `n-1` couples to `x[0]`
/// through `upper[n-1]`.
#[derive(Debug, Clone)]
pub struct CyclicTridiagonal {
    inner: Tridiagonal,
    corner_top: f64,
    gamma: f64,
    correction: Vec<f64>,
    denom: f64,
}

impl CyclicTridiagonal {
    pub fn factor(lower: &[f64], diag: &[f64], upper: &[f64]) -> Self {
        let n = diag.len();
        assert!(n >= 3, "cyclic tridiagonal systems need at least 3 unknowns");
        let corner_top = lower[0];
        let corner_bottom = upper[n - 1];
        let gamma = if diag[0] != 0.0 { -diag[0] } else { -1.0 };
        let mut modified = diag.to_vec();
        modified[0] -= gamma;
        modified[n - 1] -= corner_bottom * corner_top / gamma;
        let inner = Tridiagonal::factor(lower, &modified, upper);
        let mut correction = vec![0.0; n];
        correction[0] = gamma;
        correction[n - 1] = corner_bottom;
        inner.solve_in_place(&mut correction);
        let denom = 1.0 + correction[0] + corner_top * correction[n - 1] / gamma;
        Self {
            inner,
            corner_top,
            gamma,
            correction,
            denom,
        }
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.len();
        self.inner.solve_in_place(x);
        let fact = (x[0] + self.corner_top * x[n - 1] / self.gamma) / self.denom;
        for (xi, zi) in x.iter_mut().zip(&self.correction) {
            *xi -= fact * zi;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Outcome of a Krylov solve.
#[derive(Debug, Clone, Copy)]
pub struct KrylovStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Preconditioned conjugate gradients for symmetric positive definite
/// operators. `x` carries the initial guess and receives the solution.
pub fn conjugate_gradient<A, P>(
    apply: A,
    precondition: P,
    rhs: &[f64],
    x: &mut [f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<KrylovStats>
where
    A: Fn(&[f64], &mut [f64]),
    P: Fn(&[f64], &mut [f64]),
{
    let n = rhs.len();
    let rhs_norm = norm(rhs);
    if rhs_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(KrylovStats {
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let mut ax = vec![0.0; n];
    apply(x, &mut ax);
    let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut z = vec![0.0; n];
    precondition(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 0..max_iter {
        let res = norm(&r) / rhs_norm;
        if res <= rel_tol {
            return Ok(KrylovStats {
                iterations: it,
                relative_residual: res,
            });
        }
        apply(&p, &mut ap);
        let step = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        precondition(&r, &mut z);
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let res = norm(&r) / rhs_norm;
    if res <= rel_tol {
        return Ok(KrylovStats {
            iterations: max_iter,
            relative_residual: res,
        });
    }
    Err(Error::NoConvergence {
        what: "conjugate gradient",
        iterations: max_iter,
        estimate: norm(x),
        residual: res,
    })
}

/// Right-preconditioned BiCGSTAB for general (non-symmetric) operators.
pub fn bicgstab<A, P>(
    apply: A,
    precondition: P,
    rhs: &[f64],
    x: &mut [f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<KrylovStats>
where
    A: Fn(&[f64], &mut [f64]),
    P: Fn(&[f64], &mut [f64]),
{
    let n = rhs.len();
    let rhs_norm = norm(rhs);
    if rhs_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(KrylovStats {
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let mut tmp = vec![0.0; n];
    apply(x, &mut tmp);
    let mut r: Vec<f64> = rhs.iter().zip(&tmp).map(|(b, a)| b - a).collect();
    let r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut p_hat = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut s_hat = vec![0.0; n];
    let mut t = vec![0.0; n];
    for it in 0..max_iter {
        let res = norm(&r) / rhs_norm;
        if res <= rel_tol {
            return Ok(KrylovStats {
                iterations: it,
                relative_residual: res,
            });
        }
        let rho_next = dot(&r_hat, &r);
        if rho_next == 0.0 || omega == 0.0 {
            break;
        }
        let beta = (rho_next / rho) * (alpha / omega);
        rho = rho_next;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        precondition(&p, &mut p_hat);
        apply(&p_hat, &mut v);
        alpha = rho / dot(&r_hat, &v);
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if norm(&s) / rhs_norm <= rel_tol {
            for i in 0..n {
                x[i] += alpha * p_hat[i];
            }
            return Ok(KrylovStats {
                iterations: it + 1,
                relative_residual: norm(&s) / rhs_norm,
            });
        }
        precondition(&s, &mut s_hat);
        apply(&s_hat, &mut t);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        for i in 0..n {
            x[i] += alpha * p_hat[i] + omega * s_hat[i];
            r[i] = s[i] - omega * t[i];
        }
    }
    apply(x, &mut tmp);
    let res = rhs
        .iter()
        .zip(&tmp)
        .map(|(b, a)| (b - a) * (b - a))
        .sum::<f64>()
        .sqrt()
        / rhs_norm;
    if res <= rel_tol {
        return Ok(KrylovStats {
            iterations: max_iter,
            relative_residual: res,
        });
    }
    Err(Error::NoConvergence {
        what: "BiCGSTAB",
        iterations: max_iter,
        estimate: norm(x),
        residual: res,
    })
}
