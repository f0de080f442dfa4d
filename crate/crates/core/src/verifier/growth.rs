//! Growth functionals `A(r) = (1/π) ∫_{|z|≤r} |F_1|^2/|F_0|^4` and
//! `B(r) = ∫_{|z|≤r} e^{u_1}` by polar quadrature.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, TodaError};
use crate::odeflow::{FundamentalBasis, OdeSystem, DEFAULT_TOL};
use crate::todacurve::{anchored_log_norms, assemble_u};

/// Relative change between the base and refined quadrature above which the
/// curve is flagged as unconverged.
pub const REFINEMENT_THRESHOLD: f64 = 1e-3;

/// Default slack for [`check_growth_bound`].
pub const GROWTH_SLACK: f64 = 0.2;

/// Largest density exponent accepted before the integrand is treated as
/// overflowing.
const MAX_EXPONENT: f64 = 700.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthCurve {
    pub radii: Vec<f64>,
    #[serde(rename = "A")]
    pub a: Vec<f64>,
    #[serde(rename = "B")]
    pub b: Vec<f64>,
    pub fitted_order: f64,
    /// Largest relative change of `A` between the base grid and the grid
    /// with doubled rings and spokes.
    pub refinement_change: f64,
    pub converged: bool,
}

/// `A` and `B` over `radii`, using `rings` midpoint nodes per annulus between
/// consecutive radii and `spokes` trapezoid nodes in angle. The quadrature
/// is repeated with both counts doubled; the refined values are returned.
pub fn growth_functions(
    ode: &OdeSystem,
    radii: &[f64],
    rings: usize,
    spokes: usize,
) -> Result<GrowthCurve> {
    growth_functions_with_tol(ode, radii, rings, spokes, DEFAULT_TOL)
}

pub fn growth_functions_with_tol(
    ode: &OdeSystem,
    radii: &[f64],
    rings: usize,
    spokes: usize,
    tol: f64,
) -> Result<GrowthCurve> {
    if rings < 8 || spokes < 8 {
        return Err(TodaError::InvalidInput(format!(
            "quadrature needs at least 8 rings and 8 spokes, got {rings} and {spokes}"
        )));
    }
    check_radii(radii)?;
    let (coarse, _) = disc_integrals(ode, radii, rings, spokes, tol)?;
    let (a, b) = disc_integrals(ode, radii, 2 * rings, 2 * spokes, tol)?;
    let refinement_change = coarse
        .iter()
        .zip(&a)
        .map(|(c, f)| {
            if *f == 0.0 {
                (c - f).abs()
            } else {
                ((c - f) / f).abs()
            }
        })
        .fold(0.0, f64::max);
    Ok(GrowthCurve {
        fitted_order: fit_order(radii, &a),
        radii: radii.to_vec(),
        a,
        b,
        refinement_change,
        converged: refinement_change < REFINEMENT_THRESHOLD,
    })
}

pub(crate) fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(TodaError::InvalidInput("no radii given".into()));
    }
    if !(radii[0] > 0.0)
        || radii.windows(2).any(|w| !(w[1] > w[0]))
        || !radii[radii.len() - 1].is_finite()
    {
        return Err(TodaError::InvalidInput(
            "radii must be positive, finite and strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Cumulative `(A, B)` at each radius.
fn disc_integrals(
    ode: &OdeSystem,
    radii: &[f64],
    rings: usize,
    spokes: usize,
    tol: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let per_spoke: Vec<Vec<(f64, f64)>> = (0..spokes)
        .into_par_iter()
        .map(|s| spoke_integrals(ode, radii, rings, TAU * s as f64 / spokes as f64, tol))
        .collect::<Result<_>>()?;
    let dtheta = TAU / spokes as f64;
    let mut a = Vec::with_capacity(radii.len());
    let mut b = Vec::with_capacity(radii.len());
    let (mut acc_a, mut acc_b) = (0.0, 0.0);
    for i in 0..radii.len() {
        let (sa, sb) = per_spoke
            .iter()
            .fold((0.0, 0.0), |(x, y), row| (x + row[i].0, y + row[i].1));
        acc_a += sa * dtheta / PI;
        acc_b += sb * dtheta;
        a.push(acc_a);
        b.push(acc_b);
    }
    Ok((a, b))
}

/// Radial midpoint sums of `r |F_1|^2/|F_0|^4` and `r e^{u_1}` along one
/// spoke, one entry per annulus.
fn spoke_integrals(
    ode: &OdeSystem,
    radii: &[f64],
    rings: usize,
    theta: f64,
    tol: f64,
) -> Result<Vec<(f64, f64)>> {
    let direction = Complex64::from_polar(1.0, theta);
    let mut basis = FundamentalBasis::identity(ode, ode.rank());
    let mut inner = 0.0;
    let mut out = Vec::with_capacity(radii.len());
    for &outer in radii {
        let dr = (outer - inner) / rings as f64;
        let (mut sa, mut sb) = (0.0, 0.0);
        for l in 0..rings {
            let r = inner + (l as f64 + 0.5) * dr;
            let at = direction * r;
            basis.advance_in_place(at, tol)?;
            let norms = anchored_log_norms(&basis);
            let density = norms.log_area_density();
            let u1 = assemble_u(&norms).u[0];
            if density.is_nan() || density > MAX_EXPONENT || u1.is_nan() || u1 > MAX_EXPONENT {
                return Err(TodaError::QuadratureOverflow {
                    at,
                    exponent: density,
                });
            }
            sa += density.exp() * r * dr;
            sb += u1.exp() * r * dr;
        }
        out.push((sa, sb));
        inner = outer;
    }
    Ok(out)
}

/// Least-squares slope of `ln A` against `ln r` over `r ≥ r_max/2`.
pub fn fit_order(radii: &[f64], a: &[f64]) -> f64 {
    let r_max = radii.iter().copied().fold(0.0, f64::max);
    let pick = |min_r: f64| -> Vec<(f64, f64)> {
        radii
            .iter()
            .zip(a)
            .filter(|(r, v)| **r >= min_r && **v > 0.0)
            .map(|(r, v)| (r.ln(), v.ln()))
            .collect()
    };
    let mut pts = pick(r_max / 2.0);
    if pts.len() < 2 {
        pts = pick(0.0);
    }
    if pts.len() < 2 {
        return f64::NAN;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthBound {
    pub holds: bool,
    pub fitted_order: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub slack: f64,
    /// `K + slack - fitted_order`.
    pub margin: f64,
    /// `B(r) / r^K` at each radius.
    pub ratios: Vec<f64>,
}

/// Whether the fitted order respects `λ ≤ K` up to [`GROWTH_SLACK`].
pub fn check_growth_bound(curve: &GrowthCurve, k: f64) -> GrowthBound {
    check_growth_bound_with_slack(curve, k, GROWTH_SLACK)
}

pub fn check_growth_bound_with_slack(curve: &GrowthCurve, k: f64, slack: f64) -> GrowthBound {
    let margin = k + slack - curve.fitted_order;
    GrowthBound {
        holds: margin >= 0.0,
        fitted_order: curve.fitted_order,
        k,
        slack,
        margin,
        ratios: curve
            .radii
            .iter()
            .zip(&curve.b)
            .map(|(r, b)| b / r.powf(k))
            .collect(),
    }
}
