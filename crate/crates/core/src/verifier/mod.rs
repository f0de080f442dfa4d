//! Numerical checks of the identities satisfied by the constructed
//! solutions.

pub mod growth;
pub mod residual;
pub mod stokes;
pub mod symmetry;

pub use growth::{
    check_growth_bound, check_growth_bound_with_slack, fit_order, growth_functions,
    growth_functions_with_tol, GrowthBound, GrowthCurve, GROWTH_SLACK, REFINEMENT_THRESHOLD,
};
pub use residual::{
    check_point, laplacian_fd, plucker_residual, toda_residual, toda_residual_of_basis,
    toda_residual_perturbed, PointCheck, ResidualReport, StencilNorms,
};
pub use stokes::{
    stokes_asymptotics_check, stokes_asymptotics_check_with, RayKind, RaySamples, StokesReport,
    STOKES_WINDOW,
};
pub use symmetry::{mobius_symmetry_center, SymmetryReport, SYMMETRY_PASS};
