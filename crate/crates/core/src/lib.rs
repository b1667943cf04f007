//! Numerical laboratory for the periodic SIRS reaction-diffusion system
//!
//! ```text
//! ∂t S = dΔS − α S I + λ R
//! ∂t I = dΔI + α S I − μ I
//! ∂t R = dΔR + μ I − λ R
//! ```
//!
//! with 1-periodic coefficients `α, μ, λ` and susceptible density `S₀`.
//! The crate computes principal periodic eigenvalues, Freidlin–Gartner
//! spreading speeds, the endemic stationary state as the fixed point of
//! `T∘A∘Z`, and integrates the evolution system with front tracking.
//!
//! See the `examples/` directory for one runnable program per capability.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod coeffs;
pub mod eigen;
pub mod error;
pub mod evolution;
pub mod grids;
pub mod linalg;
pub mod scenario;
pub mod speeds;
pub mod stationary;

pub use error::{Error, Result};
pub use scenario::Scenario;
