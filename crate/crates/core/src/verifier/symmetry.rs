//! Search for the center of rotational symmetry of the spherical derivative
//! of a fractional-linear map.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::todacurve::Mobius;

/// Threshold on the angular variation for a pass.
pub const SYMMETRY_PASS: f64 = 1e-6;

const GRID: usize = 41;
const ANGLES: usize = 32;
const GOLDEN_ITERATIONS: usize = 80;
const SWEEPS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub center: Complex64,
    /// Radii of the test circles around `center`.
    pub circle_radii: Vec<f64>,
    /// Largest `(max - min) / mean` of the spherical derivative over the
    /// test circles.
    pub variation: f64,
    pub pass: bool,
}

/// Point about which `|f'|/(1+|f|^2)` is most nearly radial.
///
/// A coarse grid search over a box that contains the center is followed by
/// alternating golden-section searches along the two axes.
pub fn mobius_symmetry_center(map: &Mobius) -> SymmetryReport {
    let alpha = map.a.norm_sqr() + map.c.norm_sqr();
    let scale = map.determinant().norm() / alpha;
    let radii = vec![0.5 * scale, scale, 2.0 * scale];
    let extent = (map.a.norm() * map.b.norm() + map.c.norm() * map.d.norm()) / alpha + scale;
    let objective = |z: Complex64| asymmetry(map, z, &radii);

    let spacing = 2.0 * extent / (GRID - 1) as f64;
    let mut best = (f64::INFINITY, Complex64::new(0.0, 0.0));
    for i in 0..GRID {
        for j in 0..GRID {
            let z = Complex64::new(-extent + i as f64 * spacing, -extent + j as f64 * spacing);
            let v = objective(z);
            if v < best.0 {
                best = (v, z);
            }
        }
    }
    let mut center = best.1;
    let mut width = spacing;
    for _ in 0..SWEEPS {
        let x = golden_section(
            |x| objective(Complex64::new(x, center.im)),
            center.re - width,
            center.re + width,
        );
        center.re = x;
        let y = golden_section(
            |y| objective(Complex64::new(center.re, y)),
            center.im - width,
            center.im + width,
        );
        center.im = y;
        width *= 0.5;
    }
    let variation = radii
        .iter()
        .map(|&r| {
            let g = circle_values(map, center, r);
            let mean = g.iter().sum::<f64>() / g.len() as f64;
            let max = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = g.iter().copied().fold(f64::INFINITY, f64::min);
            (max - min) / mean
        })
        .fold(0.0, f64::max);
    SymmetryReport {
        center,
        circle_radii: radii,
        variation,
        pass: variation < SYMMETRY_PASS,
    }
}

fn circle_values(map: &Mobius, center: Complex64, r: f64) -> Vec<f64> {
    (0..ANGLES)
        .map(|k| {
            map.spherical_derivative(
                center + Complex64::from_polar(r, TAU * k as f64 / ANGLES as f64),
            )
        })
        .collect()
}

/// Sum over the circles of the squared relative deviations from the
/// circle mean.
fn asymmetry(map: &Mobius, center: Complex64, radii: &[f64]) -> f64 {
    radii
        .iter()
        .map(|&r| {
            let g = circle_values(map, center, r);
            let mean = g.iter().sum::<f64>() / g.len() as f64;
            g.iter().map(|v| ((v - mean) / mean).powi(2)).sum::<f64>()
        })
        .sum()
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..GOLDEN_ITERATIONS {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}
