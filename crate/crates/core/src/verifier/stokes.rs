//! Behaviour of the Liouville solution along Stokes rays and sector
//! bisectors.

use num_complex::Complex64;
use serde::Serialize;

use crate::classify::{stokes_directions, StokesGeometry};
use crate::error::{Result, TodaError};
use crate::odeflow::{FundamentalBasis, OdeSystem, DEFAULT_TOL};
use crate::polyjet::ComplexPoly;
use crate::todacurve::{anchored_log_norms, assemble_u};
use crate::verifier::growth::check_radii;

/// Default bound on the range of `u - (d/2) ln r` along a Stokes ray.
pub const STOKES_WINDOW: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RayKind {
    Stokes,
    Bisector,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RaySamples {
    pub theta: f64,
    pub kind: RayKind,
    pub u: Vec<f64>,
    /// `u(r) - (d/2) ln r`.
    pub diagnostic: Vec<f64>,
    /// For a bisector: `u` strictly decreasing over the top half of the
    /// radii. For a Stokes ray: diagnostic range within the window there.
    pub pass: bool,
    /// `max - min` of the diagnostic over the top half.
    pub range: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StokesReport {
    pub geometry: StokesGeometry,
    pub radii: Vec<f64>,
    pub window: f64,
    /// Smallest radius counted in the top half, `r_max / 2`.
    pub top_half_from: f64,
    /// Stokes rays and bisectors together, ascending in angle.
    pub rays: Vec<RaySamples>,
    pub pass: bool,
}

pub fn stokes_asymptotics_check(p: &ComplexPoly, radii: &[f64]) -> Result<StokesReport> {
    stokes_asymptotics_check_with(p, radii, STOKES_WINDOW, DEFAULT_TOL)
}

pub fn stokes_asymptotics_check_with(
    p: &ComplexPoly,
    radii: &[f64],
    window: f64,
    tol: f64,
) -> Result<StokesReport> {
    let geometry = stokes_directions(p)?;
    check_radii(radii)?;
    let r_max = radii[radii.len() - 1];
    if r_max < 10.0 {
        return Err(TodaError::InvalidInput(format!(
            "largest radius must be at least 10, got {r_max}"
        )));
    }
    let ode = OdeSystem::liouville(p);
    let half_d = geometry.degree as f64 / 2.0;
    let top = r_max / 2.0;
    let mut rays: Vec<(f64, RayKind)> = geometry
        .directions
        .iter()
        .map(|&t| (t, RayKind::Stokes))
        .chain(
            geometry
                .bisectors()
                .into_iter()
                .map(|t| (t, RayKind::Bisector)),
        )
        .collect();
    rays.sort_by(|a, b| a.0.total_cmp(&b.0));

    let rays = rays
        .into_iter()
        .map(|(theta, kind)| {
            let u = sample_ray(&ode, theta, radii, tol)?;
            let diagnostic: Vec<f64> = u
                .iter()
                .zip(radii)
                .map(|(u, r)| u - half_d * r.ln())
                .collect();
            let upper = |v: &[f64]| -> Vec<f64> {
                v.iter()
                    .zip(radii)
                    .filter(|(_, r)| **r >= top)
                    .map(|(x, _)| *x)
                    .collect()
            };
            let diag_top = upper(&diagnostic);
            let range = diag_top.iter().copied().fold(f64::NEG_INFINITY, f64::max)
                - diag_top.iter().copied().fold(f64::INFINITY, f64::min);
            let pass = match kind {
                RayKind::Bisector => upper(&u).windows(2).all(|w| w[1] < w[0]),
                RayKind::Stokes => range <= window,
            };
            Ok(RaySamples {
                theta,
                kind,
                u,
                diagnostic,
                pass,
                range,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StokesReport {
        pass: rays.iter().all(|r| r.pass),
        geometry,
        radii: radii.to_vec(),
        window,
        top_half_from: top,
        rays,
    })
}

/// `u` at each radius along the ray of argument `theta`.
fn sample_ray(ode: &OdeSystem, theta: f64, radii: &[f64], tol: f64) -> Result<Vec<f64>> {
    let direction = Complex64::from_polar(1.0, theta);
    let mut basis = FundamentalBasis::identity(ode, ode.rank());
    radii
        .iter()
        .map(|&r| {
            basis.advance_in_place(direction * r, tol)?;
            Ok(assemble_u(&anchored_log_norms(&basis)).u[0])
        })
        .collect()
}
