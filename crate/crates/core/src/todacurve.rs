//! Derived curves of a fundamental basis and the Toda solution they define.
//!
//! For a basis `F = (f_0, ..., f_n)` the derived curve `F_k = F ∧ F' ∧ ... ∧ F^(k)`
//! has `|F_k|^2` equal to the Gram determinant of the `(n+1) × (k+1)` jet
//! matrix (Cauchy-Binet). All norms are natural-log scaled:
//!
//! `u_k = ln|F_{k-2}|^2 - 2 ln|F_{k-1}|^2 + ln|F_k|^2 + ln 2`, with
//! `F_{-1} = 1`.

use std::f64::consts::LN_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, TodaError};
use crate::linalg::{log_gram_increments, qr_log_diagonal};
use crate::odeflow::{continue_basis, FundamentalBasis, OdeSystem};
use crate::polyjet::{ldexp, ComplexPoly, ScaledJet};

/// Smallest Gram-determinant mantissa accepted by [`derived_log_norms`].
pub const RAMIFICATION_FLOOR: f64 = 1e-300;

/// `ln |F_k|^2` for `k = -1, 0, ..., n` at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivedNorms {
    pub at: Complex64,
    /// Entry `k + 1` holds `ln |F_k|^2`; entry 0 is `ln |F_{-1}|^2 = 0`.
    lognorm: Vec<f64>,
}

impl DerivedNorms {
    /// From `ln |F_k|^2` for `k = 0..=n`; the `F_{-1}` entry is prepended.
    pub fn new(at: Complex64, from_zero: Vec<f64>) -> Self {
        let mut lognorm = Vec::with_capacity(from_zero.len() + 1);
        lognorm.push(0.0);
        lognorm.extend(from_zero);
        DerivedNorms { at, lognorm }
    }

    pub fn rank(&self) -> usize {
        self.lognorm.len() - 2
    }

    /// `ln |F_k|^2` for `-1 ≤ k ≤ n`.
    pub fn get(&self, k: isize) -> f64 {
        self.lognorm[(k + 1) as usize]
    }

    /// All entries, `k = -1` first.
    pub fn as_slice(&self) -> &[f64] {
        &self.lognorm
    }

    /// Log of the Fubini-Study area density `|F_1|^2 / |F_0|^4`.
    pub fn log_area_density(&self) -> f64 {
        self.get(1) - 2.0 * self.get(0)
    }
}

/// `Σ_{j≤k} ln |R_jj|^2` for `k = 0..=n`, plus the common scale exponent.
fn gram_log_mantissas(basis: &FundamentalBasis) -> (Vec<f64>, i64) {
    let n = basis.rank();
    let jets = basis.jets();
    let common = common_scale(jets);
    let values: Vec<&[Complex64]> = jets.iter().map(|j| j.values()).collect();
    let cols = columns(jets, &values, n, common);
    let mut acc = 0.0;
    let cumulative = qr_log_diagonal(&cols)
        .into_iter()
        .map(|d| {
            acc += 2.0 * d;
            acc
        })
        .collect();
    (cumulative, common)
}

fn common_scale(jets: &[ScaledJet]) -> i64 {
    jets.iter().map(|j| j.scale()).max().unwrap()
}

/// Columns `j = 0..=n` of the jet matrix, rows brought to scale `common`.
/// `values[i]` are mantissas in the scale of `jets[i]`.
fn columns(
    jets: &[ScaledJet],
    values: &[&[Complex64]],
    n: usize,
    common: i64,
) -> Vec<Vec<Complex64>> {
    (0..=n)
        .map(|j| {
            jets.iter()
                .zip(values)
                .map(|(jet, v)| {
                    let v = v[j];
                    let shift = jet.scale() - common;
                    Complex64::new(ldexp(v.re, shift), ldexp(v.im, shift))
                })
                .collect()
        })
        .collect()
}

/// `ln |F_k|^2` at `at + delta` minus its value at `at`, `k = 0..=n`, from
/// one Taylor step. The difference is formed without cancellation, so it
/// stays accurate for the short steps of a finite-difference stencil.
pub fn log_norm_increments(
    basis: &FundamentalBasis,
    delta: Complex64,
    tol: f64,
) -> Result<Vec<f64>> {
    let n = basis.rank();
    let jets = basis.jets();
    let common = common_scale(jets);
    let steps = basis.step_increments(delta, tol)?;
    let values: Vec<&[Complex64]> = jets.iter().map(|j| j.values()).collect();
    let step_values: Vec<&[Complex64]> = steps.iter().map(|v| v.as_slice()).collect();
    let cols = columns(jets, &values, n, common);
    let moves = columns(jets, &step_values, n, common);
    log_gram_increments(&cols, &moves).ok_or(TodaError::RamifiedPoint {
        k: n,
        at: basis.at() + delta,
    })
}

fn unscale(cumulative: &[f64], common: i64) -> Vec<f64> {
    cumulative
        .iter()
        .enumerate()
        .map(|(k, &m)| m + 2.0 * (k + 1) as f64 * common as f64 * LN_2)
        .collect()
}

/// `ln |F_k|^2` from the basis jets alone, via a Gram-Schmidt factorization
/// of the jet matrix.
///
/// Fails with [`TodaError::RamifiedPoint`] when some `|F_k|^2` vanishes
/// numerically at the evaluation point.
pub fn derived_log_norms(basis: &FundamentalBasis) -> Result<DerivedNorms> {
    if basis.order() < basis.rank() {
        return Err(TodaError::InvalidInput(format!(
            "jets of order {} cannot give F_{}",
            basis.order(),
            basis.rank()
        )));
    }
    let (cumulative, common) = gram_log_mantissas(basis);
    if let Some(k) = cumulative
        .iter()
        .position(|&m| !(m >= RAMIFICATION_FLOOR.ln()))
    {
        return Err(TodaError::RamifiedPoint { k, at: basis.at() });
    }
    Ok(DerivedNorms::new(basis.at(), unscale(&cumulative, common)))
}

/// Like [`derived_log_norms`], but `ln |F_n|^2` comes from Abel's identity
/// rather than the jet determinant.
///
/// Where the basis solutions grow at very different rates the jet
/// determinant loses every digit to cancellation, while Abel's value stays
/// exact. Intermediate norms that cancel to zero are reported as `-inf`
/// instead of failing.
pub fn anchored_log_norms(basis: &FundamentalBasis) -> DerivedNorms {
    let n = basis.rank();
    let (cumulative, common) = gram_log_mantissas(basis);
    let mut norms = unscale(&cumulative, common);
    norms[n] = 2.0 * basis.abel_wronskian().log_magnitude;
    DerivedNorms::new(basis.at(), norms)
}

/// Values `u_1, ..., u_n` of a Toda solution at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TodaPoint {
    pub at: Complex64,
    pub u: Vec<f64>,
}

pub fn assemble_u(norms: &DerivedNorms) -> TodaPoint {
    let n = norms.rank() as isize;
    let u = (1..=n)
        .map(|k| norms.get(k - 2) - 2.0 * norms.get(k - 1) + norms.get(k) + LN_2)
        .collect();
    TodaPoint { at: norms.at, u }
}

/// Toda solution of the identity-initialized basis at `at`, using the
/// Abel-anchored norms.
pub fn toda_point(ode: &OdeSystem, at: Complex64, tol: f64) -> Result<TodaPoint> {
    let basis = continue_basis(ode, at, ode.rank() + 1, tol)?;
    Ok(assemble_u(&anchored_log_norms(&basis)))
}

/// Schwarzian derivative `f'''/f' - (3/2)(f''/f')^2` at the jet center.
pub fn schwarzian(f: &ScaledJet) -> Result<Complex64> {
    if f.order() < 3 {
        return Err(TodaError::InvalidInput(
            "the Schwarzian needs a jet of order 3".into(),
        ));
    }
    let v = f.values();
    if v[1].norm() == 0.0 {
        return Err(TodaError::CriticalPoint { at: f.center() });
    }
    let ratio = v[2] / v[1];
    Ok(v[3] / v[1] - 1.5 * ratio * ratio)
}

/// Jet of order `m` of a ratio of the identity-initialized solutions of
/// `w'' + (1/2) P w = 0` at `at`: `w_1/w_2`, or `w_2/w_1` when `|w_2| < |w_1|`.
/// Both have the same Schwarzian.
pub fn liouville_ratio_jet(
    p: &ComplexPoly,
    at: Complex64,
    m: usize,
    tol: f64,
) -> Result<ScaledJet> {
    let basis = continue_basis(&OdeSystem::liouville(p), at, m.max(2), tol)?;
    let (w1, w2) = (&basis.jets()[0], &basis.jets()[1]);
    if w2.log_abs(0) >= w1.log_abs(0) {
        w1.divide(w2, m)
    } else {
        w2.divide(w1, m)
    }
}

/// Liouville solution `u = ln(2|f'|^2 / (1+|f|^2)^2)` with `f = w_1/w_2`.
///
/// Evaluated as `ln 2 + ln|W|^2 - 2 ln(|w_1|^2 + |w_2|^2)`, which is the same
/// expression cleared of denominators, so poles of `f` need no special case.
pub fn liouville_u(p: &ComplexPoly, at: Complex64, tol: f64) -> Result<f64> {
    let basis = continue_basis(&OdeSystem::liouville(p), at, 2, tol)?;
    Ok(assemble_u(&anchored_log_norms(&basis)).u[0])
}

/// Fractional-linear map `(az + b)/(cz + d)` with `ad - bc ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mobius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mobius {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        if a * d - b * c == Complex64::new(0.0, 0.0) {
            return Err(TodaError::DegenerateMobius);
        }
        Ok(Mobius { a, b, c, d })
    }

    pub fn identity() -> Self {
        let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Mobius {
            a: one,
            b: zero,
            c: zero,
            d: one,
        }
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let den = self.c * z + self.d;
        if den.norm() == 0.0 {
            return Err(TodaError::PoleAt { at: z });
        }
        Ok((self.a * z + self.b) / den)
    }

    /// Jet of order `m`: `f^(k) = (-1)^(k-1) k! c^(k-1) (ad-bc) / (cz+d)^(k+1)`.
    pub fn jet(&self, z: Complex64, m: usize) -> Result<ScaledJet> {
        let den = self.c * z + self.d;
        if den.norm() == 0.0 {
            return Err(TodaError::PoleAt { at: z });
        }
        let det = self.determinant();
        let mut values = vec![(self.a * z + self.b) / den];
        let mut term = det / (den * den);
        for k in 1..=m {
            values.push(term);
            term *= -(k as f64 + 1.0) * self.c / den;
        }
        Ok(ScaledJet::from_values(z, values))
    }

    /// Spherical derivative `|f'| / (1 + |f|^2)`, written without the pole:
    /// `|ad - bc| / (|az + b|^2 + |cz + d|^2)`.
    pub fn spherical_derivative(&self, z: Complex64) -> f64 {
        self.determinant().norm()
            / ((self.a * z + self.b).norm_sqr() + (self.c * z + self.d).norm_sqr())
    }
}

/// Jet of `(az + b)/(cz + d)` at `z`; coefficients ordered `[a, b, c, d]`.
pub fn mobius_apply(coeffs: [Complex64; 4], z: Complex64, m: usize) -> Result<ScaledJet> {
    Mobius::new(coeffs[0], coeffs[1], coeffs[2], coeffs[3])?.jet(z, m)
}
