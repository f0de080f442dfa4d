//! Order of growth of the curve defined by an ODE system, and the Stokes
//! geometry of the Liouville case.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use num_rational::Rational64;
use serde::Serialize;

use crate::error::{Result, TodaError};
use crate::odeflow::OdeSystem;
use crate::polyjet::ComplexPoly;

/// Newton diagram of `w^(n+1) + P_n w^(n) + ... + P_0 w = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NewtonDiagram {
    pub n: usize,
    /// `(k, deg P_k - k)` for every nonzero `P_k`, then `(n+1, -(n+1))`.
    pub points: Vec<(i64, i64)>,
    /// Vertices of the part of the hull boundary visible from above, left
    /// to right.
    pub hull: Vec<(i64, i64)>,
    #[serde(serialize_with = "serialize_ratio")]
    pub order: Rational64,
}

fn serialize_ratio<S: serde::Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Upper hull by the monotone chain; input sorted by x with distinct x.
fn upper_hull(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(points.len());
    for &p in points {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) >= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull
}

pub fn newton_diagram(ode: &OdeSystem) -> NewtonDiagram {
    let n = ode.rank();
    let top = (n + 1) as i64;
    let mut points: Vec<(i64, i64)> = ode
        .coefficients()
        .iter()
        .enumerate()
        .filter_map(|(k, p)| p.degree().finite().map(|d| (k as i64, d as i64 - k as i64)))
        .collect();
    points.push((top, -top));
    let hull = upper_hull(&points);
    let mut diagram = NewtonDiagram {
        n,
        points,
        hull,
        order: Rational64::from_integer(0),
    };
    diagram.order = order_from_diagram(&diagram);
    diagram
}

/// `λ = max_k (n+1-k+deg P_k)/(n+1-k)` over the nonzero coefficients, or 0
/// when every coefficient vanishes.
pub fn order_from_diagram(diagram: &NewtonDiagram) -> Rational64 {
    let top = (diagram.n + 1) as i64;
    diagram
        .points
        .iter()
        .filter(|&&(k, _)| k < top)
        .map(|&(k, height)| {
            let degree = height + k;
            Rational64::new(top - k + degree, top - k)
        })
        .max()
        .unwrap_or_else(|| Rational64::from_integer(0))
}

/// Order of the Liouville solution built from `P`: 0 for `P = 0`, otherwise
/// `deg P / 2 + 1`.
pub fn liouville_order(p: &ComplexPoly) -> Rational64 {
    match p.degree().finite() {
        None => Rational64::from_integer(0),
        Some(d) => Rational64::new(d as i64, 2) + 1,
    }
}

/// Stokes rays of `w'' + (1/2) P w = 0` for `P(z) = a z^d + ...`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StokesGeometry {
    pub degree: usize,
    pub leading: Complex64,
    /// `d + 2` ray arguments in `[0, 2π)`, ascending.
    pub directions: Vec<f64>,
    pub sector_opening: f64,
}

impl StokesGeometry {
    /// Bisectors of the sectors between consecutive Stokes rays, ascending in
    /// `[0, 2π)`.
    pub fn bisectors(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .directions
            .iter()
            .map(|&t| (t + 0.5 * self.sector_opening).rem_euclid(TAU))
            .collect();
        out.sort_by(f64::total_cmp);
        out
    }
}

/// Rays with `Im(√a z^(d/2+1)) = 0`, i.e. `arg a + (d+2) θ ≡ 0 (mod 2π)`.
///
/// `arg a` is taken in `(-π, π]`; either branch of `√a` gives the same rays.
pub fn stokes_directions(p: &ComplexPoly) -> Result<StokesGeometry> {
    let (Some(degree), Some(leading)) = (p.degree().finite(), p.leading()) else {
        return Err(TodaError::ZeroPolynomial);
    };
    let count = degree + 2;
    let opening = TAU / count as f64;
    let arg = leading.arg();
    let mut directions: Vec<f64> = (0..count)
        .map(|j| {
            let theta = ((2 * j) as f64 * PI - arg) / count as f64;
            let theta = theta.rem_euclid(TAU);
            // rem_euclid may round up to exactly 2π
            if theta >= TAU {
                0.0
            } else {
                theta
            }
        })
        .collect();
    directions.sort_by(f64::total_cmp);
    Ok(StokesGeometry {
        degree,
        leading,
        directions,
        sector_opening: opening,
    })
}
