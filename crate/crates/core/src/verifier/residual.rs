//! Finite-difference residuals of the Toda system and of the Plücker
//! formulas.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, TodaError};
use crate::odeflow::{continue_basis, FundamentalBasis, OdeSystem, DEFAULT_TOL};
use crate::todacurve::{assemble_u, derived_log_norms, log_norm_increments, DerivedNorms};

/// Series tolerance for the short stencil steps.
const STENCIL_TOL: f64 = 1e-16;

/// Stencil offsets in the order used by [`five_point`]: `+h, -h, +ih, -ih`.
fn offsets(h: f64) -> [Complex64; 4] {
    [
        Complex64::new(h, 0.0),
        Complex64::new(-h, 0.0),
        Complex64::new(0.0, h),
        Complex64::new(0.0, -h),
    ]
}

/// Five-point Laplacian from the center value and the four neighbors.
pub fn five_point(center: f64, neighbors: [f64; 4], h: f64) -> f64 {
    // differences first, so large common offsets cancel exactly
    let sum: f64 = neighbors.iter().map(|v| v - center).sum();
    sum / (h * h)
}

/// Five-point estimate of `Δ field` at `at`.
pub fn laplacian_fd<F>(mut field: F, at: Complex64, h: f64) -> Result<f64>
where
    F: FnMut(Complex64) -> Result<f64>,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(TodaError::InvalidInput(format!(
            "stencil step must be positive, got {h}"
        )));
    }
    let center = field(at)?;
    let mut neighbors = [0.0; 4];
    for (slot, d) in neighbors.iter_mut().zip(offsets(h)) {
        *slot = field(at + d)?;
    }
    let value = five_point(center, neighbors, h);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(TodaError::InvalidInput(format!(
            "field is not finite near {at}"
        )))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub at: Complex64,
    pub stencil_h: f64,
    pub residuals: Vec<f64>,
    pub max_abs: f64,
    /// `max_abs` recomputed with step `h/2`; for a smooth field it is about a
    /// quarter of `max_abs` unless rounding dominates.
    pub half_step_max_abs: f64,
}

impl ResidualReport {
    fn new(at: Complex64, stencil_h: f64, residuals: Vec<f64>, half: &[f64]) -> Self {
        ResidualReport {
            at,
            stencil_h,
            max_abs: max_abs(&residuals),
            half_step_max_abs: max_abs(half),
            residuals,
        }
    }
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(
        0.0,
        |m, v| if v.is_nan() { f64::NAN } else { m.max(v.abs()) },
    )
}

/// Strict derived norms at the center of `basis`, and their changes at the
/// four stencil neighbors. Each neighbor is one short Taylor step from the
/// center, so all five samples belong to the same basis, and the changes
/// are formed directly rather than as differences of large logarithms.
pub struct StencilNorms {
    pub h: f64,
    pub center: DerivedNorms,
    /// `ln |F_k|^2` at each neighbor minus the center value, `k = 0..=n`.
    pub increments: [Vec<f64>; 4],
}

impl StencilNorms {
    pub fn new(basis: &FundamentalBasis, h: f64, tol: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(TodaError::InvalidInput(format!(
                "stencil step must be positive, got {h}"
            )));
        }
        let step_tol = tol.min(STENCIL_TOL);
        let center = derived_log_norms(basis)?;
        let mut increments = Vec::with_capacity(4);
        for d in offsets(h) {
            increments.push(log_norm_increments(basis, d, step_tol)?);
        }
        Ok(StencilNorms {
            h,
            center,
            increments: increments.try_into().expect("four neighbors"),
        })
    }

    fn increment(&self, neighbor: usize, k: isize) -> f64 {
        if k < 0 {
            0.0
        } else {
            self.increments[neighbor][k as usize]
        }
    }

    fn laplacian_of<F: Fn(usize) -> f64>(&self, change: F) -> f64 {
        (0..4).map(change).sum::<f64>() / (self.h * self.h)
    }

    /// Laplacian of `ln |F_k|^2`.
    pub fn laplacian_log_norm(&self, k: isize) -> f64 {
        self.laplacian_of(|i| self.increment(i, k))
    }

    /// Laplacian of `u_j + perturb |z|^2`, `j = 1..=n`.
    fn laplacian_u(&self, j: usize, perturb: f64) -> f64 {
        let k = j as isize;
        let lap = self.laplacian_of(|i| {
            self.increment(i, k - 2) - 2.0 * self.increment(i, k - 1) + self.increment(i, k)
        });
        let at = self.center.at;
        let square = offsets(self.h).map(|d| (at + d).norm_sqr());
        lap + perturb * five_point(at.norm_sqr(), square, self.h)
    }

    /// `-(1/2) Δu_j + e^{u_{j-1}} - 2 e^{u_j} + e^{u_{j+1}}` for `j = 1..=n`,
    /// with `e^{u_0} = e^{u_{n+1}} = 0`.
    pub fn toda_residuals(&self, perturb: f64) -> Vec<f64> {
        let n = self.center.rank();
        let at = self.center.at;
        let u: Vec<f64> = assemble_u(&self.center)
            .u
            .iter()
            .map(|v| v + perturb * at.norm_sqr())
            .collect();
        let e = |j: usize| if j == 0 || j > n { 0.0 } else { u[j - 1].exp() };
        (1..=n)
            .map(|j| -0.5 * self.laplacian_u(j, perturb) + e(j - 1) - 2.0 * e(j) + e(j + 1))
            .collect()
    }

    /// `Δ ln|F_k|^2 - 4 |F_{k-1}|^2 |F_{k+1}|^2 / |F_k|^4` for `k < n`, and
    /// `Δ ln|F_n|^2` for `k = n`.
    pub fn plucker_residual(&self, k: usize) -> f64 {
        let n = self.center.rank();
        let k = k as isize;
        let lhs = self.laplacian_log_norm(k);
        if k as usize >= n {
            return lhs;
        }
        let c = &self.center;
        lhs - 4.0 * (c.get(k - 1) + c.get(k + 1) - 2.0 * c.get(k)).exp()
    }
}

fn stencils(
    ode: &OdeSystem,
    at: Complex64,
    h: f64,
    tol: f64,
) -> Result<(StencilNorms, StencilNorms)> {
    let basis = continue_basis(ode, at, ode.rank() + 1, tol)?;
    Ok((
        StencilNorms::new(&basis, h, tol)?,
        StencilNorms::new(&basis, h / 2.0, tol)?,
    ))
}

/// Toda residuals of the identity-initialized basis at `at`.
pub fn toda_residual(ode: &OdeSystem, at: Complex64, h: f64, tol: f64) -> Result<ResidualReport> {
    toda_residual_perturbed(ode, at, h, tol, 0.0)
}

/// [`toda_residual`] with `eps |z|^2` added to every `u_j`; a nonzero `eps`
/// must make the residual fail.
pub fn toda_residual_perturbed(
    ode: &OdeSystem,
    at: Complex64,
    h: f64,
    tol: f64,
    eps: f64,
) -> Result<ResidualReport> {
    let (full, half) = stencils(ode, at, h, tol)?;
    Ok(ResidualReport::new(
        at,
        h,
        full.toda_residuals(eps),
        &half.toda_residuals(eps),
    ))
}

/// Toda residuals for an arbitrary basis, evaluated at its current point.
pub fn toda_residual_of_basis(
    basis: &FundamentalBasis,
    h: f64,
    tol: f64,
) -> Result<ResidualReport> {
    let full = StencilNorms::new(basis, h, tol)?;
    let half = StencilNorms::new(basis, h / 2.0, tol)?;
    Ok(ResidualReport::new(
        basis.at(),
        h,
        full.toda_residuals(0.0),
        &half.toda_residuals(0.0),
    ))
}

/// Plücker residual for index `k`, `0 ≤ k ≤ n`.
pub fn plucker_residual(
    ode: &OdeSystem,
    k: usize,
    at: Complex64,
    h: f64,
) -> Result<ResidualReport> {
    if k > ode.rank() {
        return Err(TodaError::InvalidInput(format!(
            "Plücker index {k} exceeds n = {}",
            ode.rank()
        )));
    }
    let (full, half) = stencils(ode, at, h, DEFAULT_TOL)?;
    Ok(ResidualReport::new(
        at,
        h,
        vec![full.plucker_residual(k)],
        &[half.plucker_residual(k)],
    ))
}

/// All checks used by grid verification at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointCheck {
    pub at: Complex64,
    pub toda: Vec<f64>,
    /// Plücker residuals for `k = 0..=n`.
    pub plucker: Vec<f64>,
    /// `| ln|W_jet| - ln|W_Abel| |`.
    pub abel_error: f64,
}

impl PointCheck {
    pub fn toda_max(&self) -> f64 {
        max_abs(&self.toda)
    }

    pub fn plucker_max(&self) -> f64 {
        max_abs(&self.plucker)
    }
}

/// Toda, Plücker and Abel checks at `at` from one continuation.
pub fn check_point(
    ode: &OdeSystem,
    at: Complex64,
    h: f64,
    tol: f64,
    perturb: f64,
) -> Result<PointCheck> {
    let basis = continue_basis(ode, at, ode.rank() + 1, tol)?;
    let stencil = StencilNorms::new(&basis, h, tol)?;
    let (jet_log, _) = basis.jet_wronskian();
    let abel = basis.abel_wronskian();
    Ok(PointCheck {
        at,
        toda: stencil.toda_residuals(perturb),
        plucker: (0..=ode.rank())
            .map(|k| stencil.plucker_residual(k))
            .collect(),
        abel_error: (jet_log - abel.log_magnitude).abs(),
    })
}
