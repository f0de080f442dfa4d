//! Complex polynomials and truncated derivative jets.
//!
//! A [`ScaledJet`] stores `f(z), f'(z), ..., f^(m)(z)` as mantissas sharing a
//! single base-2 exponent, so solutions growing like `exp(r^λ)` stay
//! representable long after `f64` alone would overflow.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Result, TodaError};

/// Degree of a polynomial; the zero polynomial has degree `MinusInfinity`.
///
/// The variant order makes `MinusInfinity` compare below every finite degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    MinusInfinity,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::MinusInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::MinusInfinity => f.write_str("-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// Polynomial with complex coefficients in ascending powers.
///
/// Trailing zero coefficients are stripped on construction, so the zero
/// polynomial is always the empty coefficient vector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComplexPoly {
    coeffs: Vec<Complex64>,
}

impl ComplexPoly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs
            .last()
            .is_some_and(|c| *c == Complex64::new(0.0, 0.0))
        {
            coeffs.pop();
        }
        ComplexPoly { coeffs }
    }

    pub fn zero() -> Self {
        ComplexPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// Polynomial with real coefficients, ascending powers.
    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::MinusInfinity,
            len => Degree::Finite(len - 1),
        }
    }

    /// Coefficient of the highest power, `None` for the zero polynomial.
    pub fn leading(&self) -> Option<Complex64> {
        self.coeffs.last().copied()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Taylor coefficients `P^(j)(z)/j!` for `j = 0..=m`, by repeated
    /// synthetic division.
    pub fn taylor_at(&self, z: Complex64, m: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); m + 1];
        let mut work = self.coeffs.clone();
        for slot in out.iter_mut() {
            if work.is_empty() {
                break;
            }
            // Divide `work` by (x - z): remainder is the value, quotient the rest.
            let mut acc = Complex64::new(0.0, 0.0);
            let mut quotient = vec![Complex64::new(0.0, 0.0); work.len() - 1];
            for i in (0..work.len()).rev() {
                acc = acc * z + work[i];
                if i > 0 {
                    quotient[i - 1] = acc;
                }
            }
            *slot = acc;
            work = quotient;
        }
        out
    }

    /// `(P(z), P'(z), ..., P^(m)(z))`.
    pub fn eval_derivatives(&self, z: Complex64, m: usize) -> Vec<Complex64> {
        let mut factorial = 1.0;
        self.taylor_at(z, m)
            .into_iter()
            .enumerate()
            .map(|(j, t)| {
                if j > 0 {
                    factorial *= j as f64;
                }
                t * factorial
            })
            .collect()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// Antiderivative vanishing at the origin.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Complex64::new(0.0, 0.0));
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| c / (i as f64 + 1.0)),
        );
        Self::new(coeffs)
    }
}

pub fn poly_degree(p: &ComplexPoly) -> Degree {
    p.degree()
}

pub fn poly_eval_derivatives(p: &ComplexPoly, z: Complex64, m: usize) -> Vec<Complex64> {
    p.eval_derivatives(z, m)
}

/// `x * 2^k`, exact whenever the result is a normal number.
pub fn ldexp(mut x: f64, mut k: i64) -> f64 {
    const STEP: i64 = 1000;
    let up = f64::from_bits(((1023 + STEP) as u64) << 52);
    let down = f64::from_bits(((1023 - STEP) as u64) << 52);
    while k > STEP {
        x *= up;
        k -= STEP;
    }
    while k < -STEP {
        x *= down;
        k += STEP;
    }
    x * f64::from_bits(((1023 + k) as u64) << 52)
}

/// Exponent `e` with `x * 2^-e` in `[1, 2)`, for finite positive `x`.
fn binary_exponent(x: f64) -> i64 {
    let mut e = x.log2().floor() as i64;
    while ldexp(x, -e) >= 2.0 {
        e += 1;
    }
    while ldexp(x, -e) < 1.0 {
        e -= 1;
    }
    e
}

pub(crate) fn binomial_row(k: usize) -> Vec<f64> {
    let mut row = vec![1.0; k + 1];
    for j in 1..k {
        row[j] = row[j - 1] * (k + 1 - j) as f64 / j as f64;
    }
    row
}

/// Derivative jet `(f, f', ..., f^(m))` at `center`, stored as mantissas with
/// one shared base-2 exponent: the true `f^(j)` is `values[j] * 2^scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledJet {
    values: Vec<Complex64>,
    scale: i64,
    center: Complex64,
}

impl ScaledJet {
    /// Raw constructor; the mantissas are taken as given.
    pub fn new(values: Vec<Complex64>, scale: i64, center: Complex64) -> Self {
        assert!(!values.is_empty(), "a jet needs at least the value f(z)");
        ScaledJet {
            values,
            scale,
            center,
        }
    }

    /// Jet from true derivative values, rebalanced.
    pub fn from_values(center: Complex64, values: Vec<Complex64>) -> Self {
        Self::new(values, 0, center).rescale()
    }

    /// Jet of the constant function `c`.
    pub fn constant(center: Complex64, c: Complex64, m: usize) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); m + 1];
        values[0] = c;
        Self::from_values(center, values)
    }

    /// Jet of the identity map `z`.
    pub fn variable(center: Complex64, m: usize) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); m + 1];
        values[0] = center;
        if m >= 1 {
            values[1] = Complex64::new(1.0, 0.0);
        }
        Self::from_values(center, values)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    /// True derivative `f^(j)`; may overflow to infinity for large scales.
    pub fn true_value(&self, j: usize) -> Complex64 {
        let v = self.values[j];
        Complex64::new(ldexp(v.re, self.scale), ldexp(v.im, self.scale))
    }

    pub fn true_values(&self) -> Vec<Complex64> {
        (0..self.values.len()).map(|j| self.true_value(j)).collect()
    }

    /// `ln |f^(j)|`, finite even where the true value is not representable.
    pub fn log_abs(&self, j: usize) -> f64 {
        self.values[j].norm().ln() + self.scale as f64 * std::f64::consts::LN_2
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    /// Same true values with mantissa maximum modulus in `[1, 2)`; the zero
    /// jet comes back with scale 0.
    pub fn rescale(&self) -> ScaledJet {
        let max = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if max == 0.0 || !max.is_finite() {
            return ScaledJet {
                values: self.values.clone(),
                scale: if max == 0.0 { 0 } else { self.scale },
                center: self.center,
            };
        }
        let e = binary_exponent(max);
        if e == 0 {
            return self.clone();
        }
        ScaledJet {
            values: self
                .values
                .iter()
                .map(|v| Complex64::new(ldexp(v.re, -e), ldexp(v.im, -e)))
                .collect(),
            scale: self.scale + e,
            center: self.center,
        }
    }

    /// Truncate (or zero-pad) to order `m`.
    pub fn truncated(&self, m: usize) -> ScaledJet {
        let mut values = self.values.clone();
        values.resize(m + 1, Complex64::new(0.0, 0.0));
        ScaledJet {
            values,
            scale: self.scale,
            center: self.center,
        }
    }

    /// Multiply every true value by `c`.
    pub fn scaled_by(&self, c: Complex64) -> ScaledJet {
        ScaledJet {
            values: self.values.iter().map(|v| v * c).collect(),
            scale: self.scale,
            center: self.center,
        }
        .rescale()
    }

    /// Jet of the product by the Leibniz rule.
    ///
    /// Panics if the centers differ or either operand has order below `m`.
    pub fn multiply(&self, other: &ScaledJet, m: usize) -> ScaledJet {
        assert_eq!(self.center, other.center, "jet centers differ");
        assert!(self.order() >= m && other.order() >= m, "jet order too low");
        let values = (0..=m)
            .map(|k| {
                binomial_row(k)
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| self.values[j] * other.values[k - j] * c)
                    .sum()
            })
            .collect();
        ScaledJet {
            values,
            scale: self.scale + other.scale,
            center: self.center,
        }
        .rescale()
    }

    /// Jet of the quotient `self / other`.
    ///
    /// Solves `a^(k) = Σ_j C(k,j) q^(j) b^(k-j)` for `q^(k)` in turn.
    pub fn divide(&self, other: &ScaledJet, m: usize) -> Result<ScaledJet> {
        assert_eq!(self.center, other.center, "jet centers differ");
        assert!(self.order() >= m && other.order() >= m, "jet order too low");
        let b0 = other.values[0];
        if b0.norm() == 0.0 {
            return Err(TodaError::DivisionByZeroJet {
                center: self.center,
            });
        }
        let mut q: Vec<Complex64> = Vec::with_capacity(m + 1);
        for k in 0..=m {
            let row = binomial_row(k);
            let known: Complex64 = (0..k).map(|j| q[j] * other.values[k - j] * row[j]).sum();
            q.push((self.values[k] - known) / b0);
        }
        Ok(ScaledJet {
            values: q,
            scale: self.scale - other.scale,
            center: self.center,
        }
        .rescale())
    }
}

pub fn jet_multiply(a: &ScaledJet, b: &ScaledJet, m: usize) -> ScaledJet {
    a.multiply(b, m)
}

pub fn jet_divide(a: &ScaledJet, b: &ScaledJet, m: usize) -> Result<ScaledJet> {
    a.divide(b, m)
}

pub fn jet_rescale(a: &ScaledJet) -> ScaledJet {
    a.rescale()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_close(a: Complex64, b: Complex64, tol: f64) {
        assert!((a - b).norm() <= tol, "{a} vs {b}");
    }

    #[test]
    fn degree_conventions() {
        assert_eq!(ComplexPoly::zero().degree(), Degree::MinusInfinity);
        assert_eq!(
            ComplexPoly::new(vec![c(0.0, 0.0); 4]).degree(),
            Degree::MinusInfinity
        );
        assert_eq!(
            ComplexPoly::constant(c(3.0, 2.0)).degree(),
            Degree::Finite(0)
        );
        assert_eq!(
            ComplexPoly::from_real(&[0.0, 0.5]).degree(),
            Degree::Finite(1)
        );
        assert!(Degree::MinusInfinity < Degree::Finite(0));
    }

    #[test]
    fn derivatives_of_square() {
        let p = ComplexPoly::from_real(&[0.0, 0.0, 1.0]);
        let d = p.eval_derivatives(c(1.0, 1.0), 2);
        assert_close(d[0], c(0.0, 2.0), 1e-15);
        assert_close(d[1], c(2.0, 2.0), 1e-15);
        assert_close(d[2], c(2.0, 0.0), 1e-15);
    }

    #[test]
    fn derivatives_of_constant_and_monomial() {
        let five = ComplexPoly::from_real(&[5.0]);
        assert_eq!(
            five.eval_derivatives(c(-3.0, 7.0), 1),
            vec![c(5.0, 0.0), c(0.0, 0.0)]
        );
        let z = ComplexPoly::from_real(&[0.0, 1.0]);
        assert_eq!(
            z.eval_derivatives(c(0.0, 0.0), 3),
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
        );
    }

    #[test]
    fn antiderivative_matches_hand_integral() {
        let p = ComplexPoly::from_real(&[1.0, 2.0, 3.0]);
        assert_eq!(
            p.antiderivative(),
            ComplexPoly::from_real(&[0.0, 1.0, 1.0, 1.0])
        );
    }

    #[test]
    fn product_of_identity_jets() {
        let z = ScaledJet::variable(c(1.0, 0.0), 2);
        let sq = z.multiply(&z, 2).true_values();
        assert_close(sq[0], c(1.0, 0.0), 1e-15);
        assert_close(sq[1], c(2.0, 0.0), 1e-15);
        assert_close(sq[2], c(2.0, 0.0), 1e-15);
    }

    #[test]
    fn product_of_exponential_jets() {
        let e = ScaledJet::from_values(c(0.0, 0.0), vec![c(1.0, 0.0); 3]);
        let e2 = e.multiply(&e, 2).true_values();
        assert_close(e2[0], c(1.0, 0.0), 1e-15);
        assert_close(e2[1], c(2.0, 0.0), 1e-15);
        assert_close(e2[2], c(4.0, 0.0), 1e-15);
    }

    #[test]
    fn multiplicative_identity() {
        let a = ScaledJet::from_values(c(0.3, 0.1), vec![c(3.0, -1.0), c(0.25, 9.0), c(-7.0, 0.5)]);
        let one = ScaledJet::constant(c(0.3, 0.1), c(1.0, 0.0), 2);
        assert_eq!(a.multiply(&one, 2).true_values(), a.true_values());
    }

    #[test]
    fn quotient_of_monomials() {
        let z = ScaledJet::variable(c(2.0, 0.0), 2);
        let sq = z.multiply(&z, 2);
        let q = sq.divide(&z, 2).unwrap().true_values();
        assert_close(q[0], c(2.0, 0.0), 1e-15);
        assert_close(q[1], c(1.0, 0.0), 1e-15);
        assert_close(q[2], c(0.0, 0.0), 1e-15);
    }

    #[test]
    fn self_quotient_is_one() {
        let a = ScaledJet::from_values(c(0.0, 1.0), vec![c(1.5, 2.0), c(-0.5, 4.0), c(3.0, 3.0)]);
        let q = a.divide(&a, 2).unwrap().true_values();
        assert_close(q[0], c(1.0, 0.0), 1e-15);
        assert_close(q[1], c(0.0, 0.0), 1e-15);
        assert_close(q[2], c(0.0, 0.0), 1e-14);
    }

    #[test]
    fn division_by_vanishing_jet() {
        let a = ScaledJet::variable(c(0.0, 0.0), 2);
        let err = a.divide(&a, 2).unwrap_err();
        assert!(matches!(err, TodaError::DivisionByZeroJet { .. }));
    }

    #[test]
    fn rescale_examples() {
        let a = ScaledJet::new(vec![c(8.0, 0.0), c(4.0, 0.0)], 0, c(0.0, 0.0)).rescale();
        assert_eq!(a.values(), &[c(1.0, 0.0), c(0.5, 0.0)]);
        assert_eq!(a.scale(), 3);

        let zero = ScaledJet::new(vec![c(0.0, 0.0); 3], 17, c(0.0, 0.0)).rescale();
        assert_eq!(zero.scale(), 0);
        assert!(zero.is_zero());

        let balanced = ScaledJet::new(vec![c(1.5, 0.0), c(0.1, 0.0)], 7, c(0.0, 0.0));
        assert_eq!(balanced.rescale(), balanced);
    }

    #[test]
    fn ldexp_far_outside_native_range() {
        assert_eq!(ldexp(1.0, 3), 8.0);
        assert_eq!(ldexp(f64::MIN_POSITIVE, 2000), 2f64.powi(978));
        assert_eq!(
            ldexp(f64::MAX, -2000),
            f64::MAX * 2f64.powi(-1000) * 2f64.powi(-1000)
        );
        assert_eq!(ldexp(1.5, 5000), f64::INFINITY);
        assert_abs_diff_eq!(
            ScaledJet::new(vec![c(1.0, 0.0)], 4000, c(0.0, 0.0)).log_abs(0),
            4000.0 * std::f64::consts::LN_2
        );
    }

    fn arb_complex(lo: f64, hi: f64) -> impl Strategy<Value = Complex64> {
        (lo..hi, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
    }

    fn arb_jet(m: usize) -> impl Strategy<Value = ScaledJet> {
        (
            prop::collection::vec(arb_complex(1e-3, 1e3), m + 1),
            -40i64..40,
        )
            .prop_map(|(v, s)| ScaledJet::new(v, s, Complex64::new(0.25, -0.5)))
    }

    fn max_rel_diff(a: &ScaledJet, b: &ScaledJet, mag: &[f64]) -> f64 {
        a.true_values()
            .iter()
            .zip(b.true_values())
            .zip(mag)
            .map(|((x, y), m)| (x - y).norm() / m)
            .fold(0.0, f64::max)
    }

    proptest! {
        #[test]
        fn rescale_preserves_true_values(jet in arb_jet(4)) {
            let r = jet.rescale();
            prop_assert_eq!(r.true_values(), jet.true_values());
            let max = r.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
            prop_assert!((1.0..2.0).contains(&max));
        }

        #[test]
        fn multiply_commutes_and_associates(a in arb_jet(3), b in arb_jet(3), c3 in arb_jet(3)) {
            // magnitude of the Leibniz sums bounds the rounding of each entry
            let abs = |j: &ScaledJet| ScaledJet::new(j.values().iter().map(|v| Complex64::new(v.norm(), 0.0)).collect(), j.scale(), j.center());
            let mag_ab: Vec<f64> = abs(&a).multiply(&abs(&b), 3).true_values().iter().map(|v| v.re).collect();
            let ab = a.multiply(&b, 3);
            let ba = b.multiply(&a, 3);
            prop_assert!(max_rel_diff(&ab, &ba, &mag_ab) <= 4.0 * f64::EPSILON);

            let mag3: Vec<f64> = abs(&a).multiply(&abs(&b), 3).multiply(&abs(&c3), 3).true_values().iter().map(|v| v.re).collect();
            let left = ab.multiply(&c3, 3);
            let right = a.multiply(&b.multiply(&c3, 3), 3);
            prop_assert!(max_rel_diff(&left, &right, &mag3) <= 16.0 * f64::EPSILON);
        }

        #[test]
        fn divide_undoes_multiply(
            a in arb_jet(3),
            b0 in arb_complex(0.5, 1.0),
            rest in prop::collection::vec(arb_complex(1e-3, 1.0), 3),
        ) {
            let mut bv = vec![b0];
            bv.extend(rest);
            let b = ScaledJet::new(bv, 5, a.center());
            let q = a.multiply(&b, 3).divide(&b, 3).unwrap();
            let rel = q.true_values().iter().zip(a.true_values())
                .map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
                / a.true_values().iter().map(|v| v.norm()).fold(0.0, f64::max);
            prop_assert!(rel <= 1e-12, "relative error {}", rel);
        }

        #[test]
        fn derivatives_vanish_above_degree(coeffs in prop::collection::vec(arb_complex(0.1, 3.0), 1..5), z in arb_complex(0.0, 2.0)) {
            let p = ComplexPoly::new(coeffs);
            let d = p.degree().finite().unwrap();
            let ders = p.eval_derivatives(z, d + 3);
            for v in &ders[d + 1..] {
                prop_assert_eq!(*v, Complex64::new(0.0, 0.0));
            }
        }
    }
}
