//! Explicit solutions of the two-dimensional open Toda system for SU(n+1),
//! and of the Liouville equation as its `n = 1` case.
//!
//! Solutions are generated from a linear ODE
//! `w^(n+1) + P_n w^(n) + ... + P_0 w = 0` with polynomial coefficients: a
//! fundamental basis of the ODE is a holomorphic curve in projective
//! `n`-space, and the log-norms of its derived curves assemble into
//! `(u_1, ..., u_n)`.
//!
//! - [`polyjet`]: complex polynomials and scaled derivative jets.
//! - [`odeflow`]: Taylor-series continuation of a fundamental basis, Abel's
//!   identity.
//! - [`todacurve`]: derived-curve norms, the Toda solution, the Schwarzian
//!   and fractional-linear maps.
//! - [`classify`]: Newton diagram, order of growth, Stokes directions.
//! - [`verifier`]: PDE and Plücker residuals, growth functionals, Stokes
//!   asymptotics, symmetry of fractional-linear maps.

// `!(x > 0.0)` style tests are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod error;
mod linalg;
pub mod odeflow;
pub mod polyjet;
pub mod random;
pub mod todacurve;
pub mod verifier;

pub use classify::{
    liouville_order, newton_diagram, order_from_diagram, stokes_directions, NewtonDiagram,
    StokesGeometry,
};
pub use error::{Result, TodaError};
pub use linalg::wrap_phase;
pub use num_complex::Complex64;
pub use num_rational::Rational64;
pub use odeflow::{
    continue_basis, step_size, taylor_coefficients, wronskian_abel, AbelWronskian,
    FundamentalBasis, OdeSystem, DEFAULT_TOL,
};
pub use polyjet::{ComplexPoly, Degree, ScaledJet};
pub use todacurve::{
    anchored_log_norms, assemble_u, derived_log_norms, liouville_u, log_norm_increments,
    mobius_apply, schwarzian, toda_point, DerivedNorms, Mobius, TodaPoint,
};
