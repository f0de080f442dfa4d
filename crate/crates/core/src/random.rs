//! Seeded random ODE systems for property tests and verification sweeps.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::odeflow::OdeSystem;
use crate::polyjet::ComplexPoly;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform sample from the closed disc `|z| ≤ radius`.
pub fn point_in_disc<R: Rng>(rng: &mut R, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Polynomial of degree uniform in `0..=max_degree`, coefficients uniform in
/// the disc of radius `max_modulus`.
pub fn random_poly<R: Rng>(rng: &mut R, max_degree: usize, max_modulus: f64) -> ComplexPoly {
    let degree = rng.gen_range(0..=max_degree);
    let mut coeffs: Vec<Complex64> = (0..=degree)
        .map(|_| point_in_disc(rng, max_modulus))
        .collect();
    // keep the drawn degree
    if coeffs[degree].norm() == 0.0 {
        coeffs[degree] = Complex64::new(max_modulus, 0.0);
    }
    ComplexPoly::new(coeffs)
}

pub fn random_system<R: Rng>(
    rng: &mut R,
    n: usize,
    max_degree: usize,
    max_modulus: f64,
) -> OdeSystem {
    let coefficients = (0..=n)
        .map(|_| random_poly(rng, max_degree, max_modulus))
        .collect();
    OdeSystem::new(coefficients).expect("n >= 1")
}
