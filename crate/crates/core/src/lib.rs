//! Pseudospectral laboratory for the linear and semilinear damped wave
//! equation with a Hartree-type nonlocal nonlinearity on a periodic box.
//!
//! The crate provides the exact Fourier-side propagator of
//! `u_tt - Laplacian(u) + u_t = f`, the fractional heat semigroup, the Riesz
//! potential as multiplier and as direct quadrature, Littlewood-Paley /
//! homogeneous Besov norm machinery, a Duhamel exponential integrator for the
//! Hartree nonlinearity, and analysis tools (decay-rate fits, critical
//! exponent sweeps, weak-solution functionals, inequality checkers).
//!
//! The continuum problem lives on R^n; everything here is its discrete
//! surrogate on the torus [-L, L)^n, n = 1 or 2.

// `!(x > 0.0)` is the intended validation idiom here: unlike `x <= 0.0`, it
// also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod besov;
pub mod data;
pub mod error;
pub mod evolution;
pub mod field;
pub mod grid;
pub mod multipliers;
pub mod riesz;
pub mod transform;

pub use error::{Error, Result};
pub use field::{lp_norm, RealField, SpectralField};
pub use grid::{make_grid, Grid};
pub use transform::{dealias, forward_transform, inverse_transform};
