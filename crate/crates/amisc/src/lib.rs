//! Adaptive multi-index stochastic collocation.
//!
//! This crate builds sparse-grid surrogates of expensive parameterized models
//! from an ensemble of numerical discretizations of varying fidelity. A greedy
//! driver refines jointly over discretization levels and stochastic
//! interpolation levels, spending work where it buys the largest reduction of
//! the surrogate's mean and variance error per unit cost. Completed surrogates
//! convert analytically to orthonormal polynomial expansions, which yield
//! means, variances, and Sobol sensitivity indices without further model
//! evaluations.
//!
//! Modules:
//!
//! - [`rules`]: nested Clenshaw-Curtis nodes, barycentric Lagrange bases, and
//!   probability-weighted quadrature on `[-1, 1]`.
//! - [`tensor`]: tensor-product grids, interpolants, and means.
//! - [`combi`]: downward-closed index sets, combination coefficients, and
//!   sparse-grid point bookkeeping.
//! - [`adaptive`]: the greedy multi-index driver, refinement indicators, and
//!   the single-fidelity specialization.
//! - [`pce`]: transforms to orthonormal (Legendre) expansions; moments and
//!   Sobol indices.
//! - [`models`]: built-in model ensembles, including an advection-diffusion
//!   initial-boundary value problem with a random diffusivity field.
//! - [`studio`]: study configuration, convergence traces, error metrics,
//!   density estimates, and CSV reports.
//!
//! The `examples/` directory demonstrates each capability end to end; the
//! `amisc` binary drives studies from JSON configs.

pub mod adaptive;
pub mod combi;
pub mod error;
pub mod index;
pub mod models;
pub mod pce;
pub mod rules;
pub mod studio;
pub mod tensor;

pub use error::{Error, Result};
pub use index::MultiIndex;
