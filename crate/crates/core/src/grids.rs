//! Lattices for the unit periodicity cell and for the truncated evolution
//! domain, with the finite-difference operators, quadratures and linear
//! solvers built on them.
//!
//! Fields are stored flat with the first axis slowest, so iterating the
//! values visits grid points in lexicographic index order.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{bicgstab, conjugate_gradient, CyclicTridiagonal, Tridiagonal};

/// Boundary treatment on an axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Periodic,
    Neumann,
}

/// Common view of a tensor-product lattice of dimension 1 or 2.
pub trait Lattice: Clone + std::fmt::Debug {
    fn dim(&self) -> usize;
    /// Points per axis; the unused second axis of a 1D grid has length 1.
    fn shape(&self) -> [usize; 2];
    fn spacing(&self) -> f64;
    fn boundary(&self) -> Boundary;
    /// Coordinate of node `k` along an axis.
    fn coordinate(&self, k: usize) -> f64;

    fn len(&self) -> usize {
        let [a, b] = self.shape();
        a * b
    }

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn multi_index(&self, index: usize) -> [usize; 2] {
        let n1 = self.shape()[1];
        [index / n1, index % n1]
    }

    fn point(&self, index: usize) -> [f64; 2] {
        let [i, j] = self.multi_index(index);
        if self.dim() == 1 {
            [self.coordinate(i), 0.0]
        } else {
            [self.coordinate(i), self.coordinate(j)]
        }
    }

    /// Flat index of the neighbour `offset` steps along `axis`, with the
    /// boundary rule applied (wrap-around or mirror reflection).
    fn neighbor(&self, index: usize, axis: usize, offset: isize) -> usize {
        let shape = self.shape();
        let mut mi = self.multi_index(index);
        let n = shape[axis] as isize;
        let k = mi[axis] as isize + offset;
        let k = match self.boundary() {
            Boundary::Periodic => k.rem_euclid(n),
            Boundary::Neumann => {
                if k < 0 {
                    -k
                } else if k >= n {
                    2 * (n - 1) - k
                } else {
                    k
                }
            }
        };
        mi[axis] = k as usize;
        mi[0] * shape[1] + mi[1]
    }
}

/// Uniform grid on the periodicity cell `[0,1)^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellGrid {
    dim: usize,
    resolution: usize,
}

impl CellGrid {
    pub fn new(dim: usize, resolution: usize) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::validation("dimension", "must be 1 or 2"));
        }
        if resolution < 3 {
            return Err(Error::validation(
                "grid.cell_resolution",
                "need at least 3 points per axis",
            ));
        }
        Ok(Self { dim, resolution })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }
}

impl Lattice for CellGrid {
    fn dim(&self) -> usize {
        self.dim
    }

    fn shape(&self) -> [usize; 2] {
        if self.dim == 1 {
            [self.resolution, 1]
        } else {
            [self.resolution, self.resolution]
        }
    }

    fn spacing(&self) -> f64 {
        1.0 / self.resolution as f64
    }

    fn boundary(&self) -> Boundary {
        Boundary::Periodic
    }

    fn coordinate(&self, k: usize) -> f64 {
        k as f64 / self.resolution as f64
    }
}

/// Truncation `[-L, L]^n` of the whole space used for time evolution.
///
/// Periodic boxes hold the nodes `-L + k h` for `k < 2L/h`; Neumann boxes
/// also include the right end point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainGrid {
    dim: usize,
    half_width: f64,
    step: f64,
    boundary: Boundary,
    cells: usize,
}

impl DomainGrid {
    pub fn new(dim: usize, half_width: f64, step: f64, boundary: Boundary) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::validation("dimension", "must be 1 or 2"));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::validation("grid.domain_half_width", "must be positive"));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::validation("grid.domain_step", "must be positive"));
        }
        let per_period = 1.0 / step;
        if (per_period - per_period.round()).abs() > 1e-9 * per_period {
            return Err(Error::validation(
                "grid.domain_step",
                "the step must divide the period (1/h integral)",
            ));
        }
        let cells_f = 2.0 * half_width / step;
        let cells = cells_f.round();
        if (cells_f - cells).abs() > 1e-9 * cells_f || cells < 4.0 {
            return Err(Error::validation(
                "grid.domain_half_width",
                "2L/h must be an integer of at least 4",
            ));
        }
        Ok(Self {
            dim,
            half_width,
            step,
            boundary,
            cells: cells as usize,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Nodes per unit period.
    pub fn nodes_per_period(&self) -> usize {
        (1.0 / self.step).round() as usize
    }

    /// Nearest node index along one axis for the coordinate `x`.
    pub fn nearest_node(&self, x: f64) -> Option<usize> {
        let k = ((x + self.half_width) / self.step).round();
        let n = self.shape()[0] as f64;
        (k >= 0.0 && k < n).then_some(k as usize)
    }

    /// Quadrature weight of one node (trapezoidal at Neumann end points).
    pub fn weight(&self, index: usize) -> f64 {
        let h = self.step.powi(self.dim as i32);
        if self.boundary == Boundary::Periodic {
            return h;
        }
        let n = self.shape()[0];
        let [i, j] = self.multi_index(index);
        let edge = |k: usize| if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
        if self.dim == 1 {
            h * edge(i)
        } else {
            h * edge(i) * edge(j)
        }
    }
}

impl Lattice for DomainGrid {
    fn dim(&self) -> usize {
        self.dim
    }

    fn shape(&self) -> [usize; 2] {
        let n = match self.boundary {
            Boundary::Periodic => self.cells,
            Boundary::Neumann => self.cells + 1,
        };
        if self.dim == 1 {
            [n, 1]
        } else {
            [n, n]
        }
    }

    fn spacing(&self) -> f64 {
        self.step
    }

    fn boundary(&self) -> Boundary {
        self.boundary
    }

    fn coordinate(&self, k: usize) -> f64 {
        -self.half_width + k as f64 * self.step
    }
}

/// Grid samples of a scalar function.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<G> {
    grid: G,
    values: Vec<f64>,
}

pub type CellField = Field<CellGrid>;
pub type DomainField = Field<DomainGrid>;

impl<G: Lattice> Field<G> {
    pub fn from_values(grid: G, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::validation(
                "field",
                format!("{} values for a grid of {} points", values.len(), grid.len()),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::validation("field", format!("non-finite value at index {i}")));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: G, value: f64) -> Self {
        let values = vec![value; grid.len()];
        Self { grid, values }
    }

    pub fn zeros(grid: G) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn from_fn(grid: G, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self { grid, values }
    }

    pub(crate) fn from_raw(grid: G, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> &G {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.values.len(), other.values.len(), "fields on different grids");
        Self::from_raw(
            self.grid.clone(),
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Plain mean of the samples; on a periodic grid this is the
    /// trapezoidal rule for the cell average.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Cell average of a periodic field.
pub fn cell_average(field: &CellField) -> f64 {
    field.mean()
}

/// L² norm over the unit cell.
pub fn l2_norm(field: &CellField) -> f64 {
    (field.values.iter().map(|v| v * v).sum::<f64>() / field.values.len() as f64).sqrt()
}

pub fn sup_norm<G: Lattice>(field: &Field<G>) -> f64 {
    field.sup_norm()
}

/// L² inner product over the unit cell.
pub fn cell_inner(a: &CellField, b: &CellField) -> f64 {
    a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum::<f64>() / a.values.len() as f64
}

/// Second-order centred Laplacian, `2n+1`-point stencil.
pub fn apply_laplacian<G: Lattice>(field: &Field<G>) -> Field<G> {
    let grid = &field.grid;
    let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    let u = &field.values;
    let values = (0..u.len())
        .map(|i| {
            let mut acc = 0.0;
            for axis in 0..grid.dim() {
                let p = grid.neighbor(i, axis, 1);
                let m = grid.neighbor(i, axis, -1);
                acc += u[p] - 2.0 * u[i] + u[m];
            }
            acc * inv_h2
        })
        .collect();
    Field::from_raw(grid.clone(), values)
}

/// Centred first-difference approximation of `rho · ∇u` on the cell.
pub fn apply_gradient_dot(rho: &[f64], field: &CellField) -> CellField {
    let grid = field.grid;
    let scale = 0.5 / grid.spacing();
    let u = &field.values;
    let values = (0..u.len())
        .map(|i| {
            (0..grid.dim())
                .map(|axis| {
                    let r = rho.get(axis).copied().unwrap_or(0.0);
                    if r == 0.0 {
                        return 0.0;
                    }
                    let p = grid.neighbor(i, axis, 1);
                    let m = grid.neighbor(i, axis, -1);
                    r * (u[p] - u[m]) * scale
                })
                .sum()
        })
        .collect();
    Field::from_raw(grid, values)
}

/// Discrete Dirichlet energy `∫ |∇u|²` with one-sided differences, the
/// summation-by-parts partner of [`apply_laplacian`].
pub fn dirichlet_energy(field: &CellField) -> f64 {
    let grid = field.grid;
    let h = grid.spacing();
    let u = &field.values;
    let mut acc = 0.0;
    for i in 0..u.len() {
        for axis in 0..grid.dim() {
            let p = grid.neighbor(i, axis, 1);
            let g = (u[p] - u[i]) / h;
            acc += g * g;
        }
    }
    acc / u.len() as f64
}

/// The periodic cell operator `u ↦ −a Δu + b·∇u + c(x) u`.
#[derive(Debug, Clone)]
pub struct CellOperator {
    grid: CellGrid,
    diffusion: f64,
    drift: [f64; 2],
    reaction: Vec<f64>,
}

impl CellOperator {
    pub fn new(grid: CellGrid, diffusion: f64, drift: &[f64], reaction: Vec<f64>) -> Self {
        assert_eq!(reaction.len(), grid.len());
        let mut b = [0.0; 2];
        for (slot, v) in b.iter_mut().zip(drift) {
            *slot = *v;
        }
        Self {
            grid,
            diffusion,
            drift: b,
            reaction,
        }
    }

    pub fn grid(&self) -> &CellGrid {
        &self.grid
    }

    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        let g = &self.grid;
        let h = g.spacing();
        let a = self.diffusion / (h * h);
        let b = [self.drift[0] * 0.5 / h, self.drift[1] * 0.5 / h];
        for i in 0..u.len() {
            let mut acc = self.reaction[i] * u[i];
            for axis in 0..g.dim() {
                let p = g.neighbor(i, axis, 1);
                let m = g.neighbor(i, axis, -1);
                acc += -a * (u[p] - 2.0 * u[i] + u[m]) + b[axis] * (u[p] - u[m]);
            }
            out[i] = acc;
        }
    }

    pub fn apply_field(&self, u: &CellField) -> CellField {
        let mut out = vec![0.0; u.values.len()];
        self.apply(&u.values, &mut out);
        Field::from_raw(self.grid, out)
    }

    fn axis_factor(&self, axis: usize, shift: &[f64]) -> CyclicTridiagonal {
        let n = self.grid.resolution();
        let h = self.grid.spacing();
        let a = self.diffusion / (h * h);
        let b = self.drift[axis] * 0.5 / h;
        let lower = vec![-a - b; n];
        let upper = vec![-a + b; n];
        let diag: Vec<f64> = shift.iter().map(|c| 2.0 * a + c).collect();
        CyclicTridiagonal::factor(&lower, &diag, &upper)
    }

    /// Solves `L u = rhs`. Direct in 1D; in 2D a Krylov iteration
    /// preconditioned by the alternating-direction factorization. `u`
    /// carries the initial guess.
    pub fn solve(&self, rhs: &[f64], u: &mut [f64], rel_tol: f64) -> Result<()> {
        let n = self.grid.resolution();
        if self.grid.dim() == 1 {
            let lu = self.axis_factor(0, &self.reaction);
            u.copy_from_slice(rhs);
            lu.solve_in_place(u);
            return Ok(());
        }
        let mean_c = self.reaction.iter().sum::<f64>() / self.reaction.len() as f64;
        let c_bar = mean_c.max(1e-3 * (1.0 + self.diffusion * (n * n) as f64));
        let fx = self.axis_factor(0, &vec![c_bar; n]);
        let fy = self.axis_factor(1, &vec![c_bar; n]);
        let precondition = |r: &[f64], z: &mut [f64]| {
            z.copy_from_slice(r);
            let mut line = vec![0.0; n];
            for j in 0..n {
                for i in 0..n {
                    line[i] = z[i * n + j];
                }
                fx.solve_in_place(&mut line);
                for i in 0..n {
                    z[i * n + j] = line[i];
                }
            }
            for i in 0..n {
                let row = &mut z[i * n..(i + 1) * n];
                fy.solve_in_place(row);
                row.iter_mut().for_each(|v| *v *= c_bar);
            }
        };
        let apply = |x: &[f64], y: &mut [f64]| self.apply(x, y);
        let max_iter = 20 * n * n;
        let symmetric_positive =
            self.drift == [0.0, 0.0] && self.reaction.iter().all(|&c| c > 0.0);
        if symmetric_positive {
            conjugate_gradient(apply, precondition, rhs, u, rel_tol, max_iter)?;
        } else {
            bicgstab(apply, precondition, rhs, u, rel_tol, max_iter)?;
        }
        Ok(())
    }
}

/// Prefactored backward-Euler diffusion solve `(I − a Δ) u = rhs` on the
/// evolution domain, dimension-split in 2D.
#[derive(Debug, Clone)]
pub struct DiffusionSolver {
    grid: DomainGrid,
    periodic: Option<CyclicTridiagonal>,
    neumann: Option<Tridiagonal>,
}

impl DiffusionSolver {
    /// `a = dt · d`.
    pub fn new(grid: DomainGrid, a: f64) -> Self {
        let n = grid.shape()[0];
        let h = grid.spacing();
        let s = a / (h * h);
        let diag = vec![1.0 + 2.0 * s; n];
        match grid.boundary() {
            Boundary::Periodic => {
                let off = vec![-s; n];
                Self {
                    grid,
                    periodic: Some(CyclicTridiagonal::factor(&off, &diag, &off)),
                    neumann: None,
                }
            }
            Boundary::Neumann => {
                let mut lower = vec![-s; n];
                let mut upper = vec![-s; n];
                upper[0] = -2.0 * s;
                lower[n - 1] = -2.0 * s;
                lower[0] = 0.0;
                upper[n - 1] = 0.0;
                Self {
                    grid,
                    periodic: None,
                    neumann: Some(Tridiagonal::factor(&lower, &diag, &upper)),
                }
            }
        }
    }

    fn solve_line(&self, line: &mut [f64]) {
        if let Some(f) = &self.periodic {
            f.solve_in_place(line);
        } else if let Some(f) = &self.neumann {
            f.solve_in_place(line);
        }
    }

    pub fn solve_in_place(&self, u: &mut [f64]) {
        let n = self.grid.shape()[0];
        if self.grid.dim() == 1 {
            self.solve_line(u);
            return;
        }
        let mut line = vec![0.0; n];
        for j in 0..n {
            for i in 0..n {
                line[i] = u[i * n + j];
            }
            self.solve_line(&mut line);
            for i in 0..n {
                u[i * n + j] = line[i];
            }
        }
        for i in 0..n {
            self.solve_line(&mut u[i * n..(i + 1) * n]);
        }
    }
}

/// Total discrete mass `Σ w_k u_k` over the evolution domain.
pub fn total_mass(field: &DomainField) -> f64 {
    let g = &field.grid;
    field
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| g.weight(i) * v)
        .sum()
}

/// Writes fields sharing one grid as whitespace-separated columns: the
/// coordinates, then one column per field, under a header row.
pub fn write_columns<G: Lattice, W: Write>(
    out: &mut W,
    columns: &[(&str, &Field<G>)],
) -> std::io::Result<()> {
    let Some((_, first)) = columns.first() else {
        return Ok(());
    };
    let grid = first.grid();
    let mut header: Vec<String> = (0..grid.dim()).map(|a| format!("x{a}")).collect();
    header.extend(columns.iter().map(|(name, _)| name.to_string()));
    writeln!(out, "{}", header.join(" "))?;
    for i in 0..grid.len() {
        let p = grid.point(i);
        let mut row: Vec<String> = p[..grid.dim()].iter().map(|x| format!("{x:.10e}")).collect();
        row.extend(columns.iter().map(|(_, f)| format!("{:.16e}", f.values()[i])));
        writeln!(out, "{}", row.join(" "))?;
    }
    Ok(())
}
