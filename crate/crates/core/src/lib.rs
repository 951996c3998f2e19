//! A numerical laboratory for left-definite theory, Hilbert scales and
//! self-adjoint extensions of semi-bounded operators, all realized on
//! finite-dimensional models.
//!
//! Module map:
//!
//! * [`linalg`] Hermitian eigendecomposition, matrix powers, subspaces and
//!   linear relations.
//! * [`leftdef`] left-definite spaces `H_r`, their operators and the
//!   shifted closed forms `t_r`.
//! * [`hscale`] the scale `H_s(A)`, duality pairings and the power-law
//!   membership model.
//! * [`classical`] the Laguerre left-definite inner product with its
//!   `b_j(n, k)` coefficients, Gauss-Laguerre rules, the Jacobi eigenvalue law.
//! * [`extensions`] deficiency indices, von Neumann decomposition,
//!   Friedrichs relations and finite-rank perturbations `A0 + BΘB*`.
//! * [`sl`] finite-difference Sturm-Liouville operators, Wronskians and
//!   boundary functionals.
//! * [`scenario`] JSON scenario configs, orchestration and report output.

pub mod classical;
pub mod error;
pub mod extensions;
pub mod hscale;
pub mod leftdef;
pub mod linalg;
pub mod report;
pub mod rng;
pub mod scenario;
pub mod sl;

pub use error::{Error, Result};
