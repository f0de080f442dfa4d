//! Fixtures shared by the criterion benchmarks.

use num_complex::Complex64;
use toda_core::random::{random_system, seeded_rng};
use toda_core::{ComplexPoly, OdeSystem};

/// `w'' + (z/2) w = 0`.
pub fn airy() -> OdeSystem {
    OdeSystem::new(vec![
        ComplexPoly::new(vec![Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)]),
        ComplexPoly::zero(),
    ])
    .unwrap()
}

/// Seeded system of rank `n` with quadratic coefficients in the unit disc.
pub fn random(n: usize, seed: u64) -> OdeSystem {
    random_system(&mut seeded_rng(seed), n, 2, 1.0)
}
