//! Fundamental solutions of `w^(n+1) + P_n w^(n) + ... + P_0 w = 0` with
//! polynomial coefficients, continued along straight segments by local Taylor
//! series.
//!
//! Each step expands the coefficients about the current point, builds the
//! normalized series of the identity-initialized local basis, and maps the
//! carried jets through the resulting transition matrix. Jets are rebalanced
//! after every step, so values far beyond the `f64` range are carried as
//! mantissa and exponent.

use num_complex::Complex64;

use crate::error::{Result, TodaError};
use crate::linalg::{log_det, wrap_phase};
use crate::polyjet::{ComplexPoly, ScaledJet};

/// Default continuation tolerance per unit step length.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Largest number of Taylor terms in a single step.
pub const MAX_SERIES_ORDER: usize = 256;
/// Step halvings before giving up with [`TodaError::ToleranceUnachievable`].
pub const MAX_HALVINGS: usize = 40;
/// Steps shorter than this raise [`TodaError::StepUnderflow`].
pub const MIN_STEP: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Linear ODE `w^(n+1) + P_n w^(n) + ... + P_0 w = 0` of order `n + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeSystem {
    n: usize,
    coefficients: Vec<ComplexPoly>,
}

impl OdeSystem {
    /// System with coefficients `P_0..=P_n`; `n` is inferred and must be ≥ 1.
    pub fn new(coefficients: Vec<ComplexPoly>) -> Result<Self> {
        if coefficients.len() < 2 {
            return Err(TodaError::InvalidInput(format!(
                "an ODE system needs at least 2 coefficients (n >= 1), got {}",
                coefficients.len()
            )));
        }
        Ok(OdeSystem {
            n: coefficients.len() - 1,
            coefficients,
        })
    }

    pub fn with_rank(n: usize, coefficients: Vec<ComplexPoly>) -> Result<Self> {
        if coefficients.len() != n + 1 {
            return Err(TodaError::InvalidInput(format!(
                "rank {n} needs {} coefficients, got {}",
                n + 1,
                coefficients.len()
            )));
        }
        Self::new(coefficients)
    }

    /// `w^(n+1) = 0`, whose solutions span the rational normal curve.
    pub fn trivial(n: usize) -> Self {
        assert!(n >= 1);
        OdeSystem {
            n,
            coefficients: vec![ComplexPoly::zero(); n + 1],
        }
    }

    /// `w'' + (1/2) P w = 0`.
    pub fn liouville(p: &ComplexPoly) -> Self {
        OdeSystem {
            n: 1,
            coefficients: vec![p.scaled(Complex64::new(0.5, 0.0)), ComplexPoly::zero()],
        }
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[ComplexPoly] {
        &self.coefficients
    }

    pub fn coefficient(&self, k: usize) -> &ComplexPoly {
        &self.coefficients[k]
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.coefficients
            .iter()
            .filter_map(|p| p.degree().finite())
            .max()
    }

    /// `ρ = max_k |P_k(at)|^(1/(n+1-k))`, the local growth rate of solutions.
    pub fn growth_scale(&self, at: Complex64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(k, p)| p.eval(at).norm().powf(1.0 / (self.n + 1 - k) as f64))
            .fold(0.0, f64::max)
    }
}

/// Coefficients of the ODE expanded about `z0` in the scaled variable
/// `t = δ s`, so that Taylor terms `b_m = c_m δ^m` stay of moderate size.
struct LocalExpansion {
    n: usize,
    /// `q[k][i] = (P_k^(i)(z0)/i!) δ^(i+n+1-k)`
    q: Vec<Vec<Complex64>>,
    /// Number of consecutive small terms required by the tail test.
    run: usize,
}

impl LocalExpansion {
    fn new(ode: &OdeSystem, z0: Complex64, delta: Complex64) -> Self {
        let n = ode.n;
        let q = ode
            .coefficients
            .iter()
            .enumerate()
            .map(|(k, p)| match p.degree().finite() {
                None => Vec::new(),
                Some(d) => p
                    .taylor_at(z0, d)
                    .into_iter()
                    .enumerate()
                    .map(|(i, t)| t * delta.powi((i + n + 1 - k) as i32))
                    .collect(),
            })
            .collect();
        let run = n + 2 + ode.max_degree().unwrap_or(0);
        LocalExpansion { n, q, run }
    }

    /// Append the next term from the recurrence; `b` holds at least `n+1` terms.
    fn push_term(&self, b: &mut Vec<Complex64>) {
        let n = self.n;
        let m = b.len() - (n + 1);
        let mut sum = ZERO;
        for (k, qk) in self.q.iter().enumerate() {
            for (i, &qki) in qk.iter().enumerate().take(m + 1) {
                let l = m - i;
                sum += qki * b[l + k] * rising(l, k);
            }
        }
        b.push(-sum / rising(m, n + 1));
    }

    /// Series of the solution with normalized initial data `init`, extended
    /// until the last `run` terms (weighted for derivatives up to order `n`)
    /// fall below `tol` relative to the largest term.
    fn converged_series(&self, init: &[Complex64], tol: f64) -> Option<Vec<Complex64>> {
        let n = self.n;
        let mut b = init.to_vec();
        let mut largest = b.iter().map(|x| x.norm()).fold(0.0, f64::max);
        while b.len() < MAX_SERIES_ORDER {
            self.push_term(&mut b);
            let last = b.last().unwrap().norm();
            if !last.is_finite() {
                return None;
            }
            largest = largest.max(last);
            if b.len() >= n + 1 + self.run {
                let tail: f64 = (b.len() - self.run..b.len())
                    .map(|k| b[k].norm() * derivative_weight(k, n))
                    .sum();
                if tail <= tol * largest {
                    return Some(b);
                }
            }
        }
        None
    }
}

/// `(l+1)(l+2)...(l+k) = (l+k)!/l!`
fn rising(l: usize, k: usize) -> f64 {
    (1..=k).map(|t| (l + t) as f64).product()
}

/// `C(k+n, n)`, an upper bound for `C(k, j)` with `j ≤ n`.
fn derivative_weight(k: usize, n: usize) -> f64 {
    (1..=n).map(|t| (k + t) as f64 / t as f64).product()
}

fn binomial(k: usize, j: usize) -> f64 {
    (0..j).map(|t| (k - t) as f64 / (t + 1) as f64).product()
}

/// First `count` Taylor coefficients of the local solution with
/// `w^(i)(z0) = init[i]`, `i = 0..=n`.
///
/// Panics unless `init` has `n+1` entries and `count > n+1`.
pub fn taylor_coefficients(
    ode: &OdeSystem,
    z0: Complex64,
    init: &[Complex64],
    count: usize,
) -> Vec<Complex64> {
    let n = ode.n;
    assert_eq!(init.len(), n + 1, "initial data must have n+1 entries");
    assert!(count > n + 1, "need more than n+1 coefficients");
    let expansion = LocalExpansion::new(ode, z0, ONE);
    let mut factorial = 1.0;
    let mut c: Vec<Complex64> = init
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if i > 0 {
                factorial *= i as f64;
            }
            v / factorial
        })
        .collect();
    while c.len() < count {
        expansion.push_term(&mut c);
    }
    c
}

/// Normalized transition matrix of one step: row `i` holds
/// `Σ_k b_k C(k, j)` for the series `b` with initial data `e_i`.
fn transition(
    ode: &OdeSystem,
    at: Complex64,
    delta: Complex64,
    tol: f64,
) -> Option<Vec<Vec<Complex64>>> {
    transition_matrix(ode, at, delta, tol, false)
}

/// [`transition`], or with `minus_identity` the matrix minus the identity,
/// formed by leaving out the unit diagonal term instead of subtracting it.
fn transition_matrix(
    ode: &OdeSystem,
    at: Complex64,
    delta: Complex64,
    tol: f64,
    minus_identity: bool,
) -> Option<Vec<Vec<Complex64>>> {
    let n = ode.n;
    let expansion = LocalExpansion::new(ode, at, delta);
    (0..=n)
        .map(|i| {
            let mut init = vec![ZERO; n + 1];
            init[i] = ONE;
            let b = expansion.converged_series(&init, tol)?;
            let mut row = vec![ZERO; n + 1];
            for (k, &bk) in b.iter().enumerate() {
                if minus_identity && k == i {
                    // b_i = 1 contributes C(i, j) for j < i and the unit diagonal
                    for (j, slot) in row.iter_mut().enumerate().take(i) {
                        *slot += binomial(i, j);
                    }
                    continue;
                }
                let mut binom = 1.0;
                for (j, slot) in row.iter_mut().enumerate() {
                    if j > k {
                        break;
                    }
                    *slot += bk * binom;
                    binom *= (k - j) as f64 / (j + 1) as f64;
                }
            }
            Some(row)
        })
        .collect()
}

/// Initial step bound `min(1, 1/(1+ρ))`.
fn heuristic_step(ode: &OdeSystem, at: Complex64) -> f64 {
    (1.0 / (1.0 + ode.growth_scale(at))).min(1.0)
}

/// Step length used at `at`: the `ρ` heuristic, halved until the local series
/// of the identity basis meets `tol` per unit length.
pub fn step_size(ode: &OdeSystem, at: Complex64, tol: f64) -> f64 {
    let mut h = heuristic_step(ode, at);
    for _ in 0..MAX_HALVINGS {
        if h < MIN_STEP || transition(ode, at, Complex64::new(h, 0.0), tol * h).is_some() {
            break;
        }
        h *= 0.5;
    }
    h
}

/// Wronskian predicted by Abel's identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbelWronskian {
    pub log_magnitude: f64,
    /// Unwrapped argument, `-Im ∫ P_n`.
    pub phase: f64,
}

/// `W(target)` for the identity-initialized basis at 0:
/// `W(z) = exp(-∫_0^z P_n)`, integrated in closed form.
pub fn wronskian_abel(ode: &OdeSystem, target: Complex64) -> AbelWronskian {
    let integral = ode.coefficients[ode.n].antiderivative().eval(target);
    AbelWronskian {
        log_magnitude: -integral.re,
        phase: -integral.im,
    }
}

/// Known Wronskian value at one point, propagated elsewhere by Abel.
#[derive(Debug, Clone, Copy, PartialEq)]
struct WronskianAnchor {
    at: Complex64,
    log_magnitude: f64,
    phase: f64,
}

/// Jets of `n+1` linearly independent solutions at a common point.
///
/// Bases built by [`FundamentalBasis::identity`] satisfy
/// `f_j^(i)(basepoint) = δ_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalBasis {
    ode: OdeSystem,
    basepoint: Complex64,
    at: Complex64,
    jets: Vec<ScaledJet>,
    anchor: WronskianAnchor,
}

impl FundamentalBasis {
    pub fn identity(ode: &OdeSystem, m: usize) -> Self {
        Self::identity_at(ode, ZERO, m)
    }

    /// Identity-initialized basis at `basepoint`, jets of order `m ≥ n`.
    pub fn identity_at(ode: &OdeSystem, basepoint: Complex64, m: usize) -> Self {
        let n = ode.n;
        assert!(m >= n, "jet order must be at least n");
        let jets = (0..=n)
            .map(|i| {
                let mut init = vec![ZERO; n + 1];
                init[i] = ONE;
                extend_jet(ode, &ScaledJet::new(init, 0, basepoint), m)
            })
            .collect();
        FundamentalBasis {
            ode: ode.clone(),
            basepoint,
            at: basepoint,
            jets,
            anchor: WronskianAnchor {
                at: basepoint,
                log_magnitude: 0.0,
                phase: 0.0,
            },
        }
    }

    /// Basis from caller-supplied jets (one per solution, common center,
    /// order ≥ n). The jets are not checked against the ODE; the Wronskian
    /// anchor is taken from their determinant.
    pub fn from_jets(ode: &OdeSystem, jets: Vec<ScaledJet>) -> Result<Self> {
        let n = ode.n;
        if jets.len() != n + 1 {
            return Err(TodaError::InvalidInput(format!(
                "expected {} jets, got {}",
                n + 1,
                jets.len()
            )));
        }
        let at = jets[0].center();
        if jets.iter().any(|j| j.center() != at || j.order() < n) {
            return Err(TodaError::InvalidInput(
                "jets must share a center and have order >= n".into(),
            ));
        }
        let mut basis = FundamentalBasis {
            ode: ode.clone(),
            basepoint: at,
            at,
            jets,
            anchor: WronskianAnchor {
                at,
                log_magnitude: 0.0,
                phase: 0.0,
            },
        };
        let (log_magnitude, phase) = basis.jet_wronskian();
        if log_magnitude == f64::NEG_INFINITY {
            return Err(TodaError::RamifiedPoint { k: n, at });
        }
        basis.anchor = WronskianAnchor {
            at,
            log_magnitude,
            phase,
        };
        Ok(basis)
    }

    pub fn ode(&self) -> &OdeSystem {
        &self.ode
    }

    pub fn rank(&self) -> usize {
        self.ode.n
    }

    pub fn basepoint(&self) -> Complex64 {
        self.basepoint
    }

    /// Point where the jets are evaluated.
    pub fn at(&self) -> Complex64 {
        self.at
    }

    pub fn jets(&self) -> &[ScaledJet] {
        &self.jets
    }

    pub fn order(&self) -> usize {
        self.jets[0].order()
    }

    /// Same solutions with every jet multiplied by `c`.
    pub fn scaled_by(&self, c: Complex64) -> Self {
        let n1 = (self.ode.n + 1) as f64;
        FundamentalBasis {
            jets: self.jets.iter().map(|j| j.scaled_by(c)).collect(),
            anchor: WronskianAnchor {
                log_magnitude: self.anchor.log_magnitude + n1 * c.norm().ln(),
                phase: self.anchor.phase + n1 * c.arg(),
                ..self.anchor
            },
            ..self.clone()
        }
    }

    /// Basis continued to `target` along the straight segment from the
    /// current point, with jets of order `m`.
    pub fn advance(&self, target: Complex64, m: usize, tol: f64) -> Result<Self> {
        let mut next = self.clone();
        next.advance_in_place(target, tol)?;
        if next.order() != m {
            next.jets = next
                .jets
                .iter()
                .map(|j| extend_jet(&self.ode, &j.truncated(self.ode.n), m))
                .collect();
        }
        Ok(next)
    }

    /// Continue to `target`, keeping the current jet order.
    pub fn advance_in_place(&mut self, target: Complex64, tol: f64) -> Result<()> {
        if !(tol > 0.0 && tol <= 1e-3) {
            return Err(TodaError::InvalidInput(format!(
                "continuation tolerance must lie in (0, 1e-3], got {tol:e}"
            )));
        }
        let n = self.ode.n;
        let m = self.order();
        let start = self.at;
        let span = target - start;
        let length = span.norm();
        if length == 0.0 {
            return Ok(());
        }
        let direction = span / length;
        let mut state: Vec<ScaledJet> = self.jets.iter().map(|j| j.truncated(n)).collect();
        let mut point = start;
        let mut travelled = 0.0;
        while travelled < length {
            let remaining = length - travelled;
            let mut h = heuristic_step(&self.ode, point);
            // absorb a sliver left over by rounding into this step
            if h >= remaining * (1.0 - 1e-6) {
                h = remaining;
            }
            let mut halvings = 0;
            let (delta, matrix) = loop {
                if h < MIN_STEP {
                    return Err(TodaError::StepUnderflow {
                        at: point,
                        min_step: MIN_STEP,
                    });
                }
                let last = h == remaining;
                let delta = if last { target - point } else { direction * h };
                if let Some(t) = transition(&self.ode, point, delta, tol * h) {
                    break (delta, t);
                }
                halvings += 1;
                if halvings > MAX_HALVINGS {
                    return Err(TodaError::ToleranceUnachievable { at: point, tol });
                }
                h *= 0.5;
            };
            let last = h == remaining;
            point = if last { target } else { point + delta };
            travelled = if last { length } else { travelled + h };
            state = state
                .iter()
                .map(|jet| apply_transition(jet, &matrix, delta, point))
                .collect();
        }
        self.jets = state.iter().map(|j| extend_jet(&self.ode, j, m)).collect();
        self.at = target;
        Ok(())
    }

    /// `(ln |W|, arg W)` of the jet matrix `[f_i^(j)]`, `j ≤ n`.
    /// A singular matrix gives `ln |W| = -inf`.
    pub fn jet_wronskian(&self) -> (f64, f64) {
        let n = self.ode.n;
        let rows = self
            .jets
            .iter()
            .map(|j| j.values()[..=n].to_vec())
            .collect();
        let (log_mag, phase) = log_det(rows);
        let scale: i64 = self.jets.iter().map(|j| j.scale()).sum();
        (log_mag + scale as f64 * std::f64::consts::LN_2, phase)
    }

    /// Abel's prediction of the Wronskian at the current point.
    pub fn abel_wronskian(&self) -> AbelWronskian {
        let primitive = self.ode.coefficients[self.ode.n].antiderivative();
        let integral = primitive.eval(self.at) - primitive.eval(self.anchor.at);
        AbelWronskian {
            log_magnitude: self.anchor.log_magnitude - integral.re,
            phase: self.anchor.phase - integral.im,
        }
    }
}

impl FundamentalBasis {
    /// Change of the derivative mantissas `f_i^(j)`, `j ≤ n`, over one
    /// Taylor step from the current point to `at + delta`, each in its own
    /// jet's scale. The increments are formed without the current values,
    /// so they keep full relative accuracy for short steps.
    pub fn step_increments(&self, delta: Complex64, tol: f64) -> Result<Vec<Vec<Complex64>>> {
        let n = self.ode.n;
        let h = delta.norm();
        if h == 0.0 {
            return Ok(vec![vec![ZERO; n + 1]; n + 1]);
        }
        let matrix = transition_matrix(&self.ode, self.at, delta, tol * h, true)
            .ok_or(TodaError::ToleranceUnachievable { at: self.at, tol })?;
        Ok(self
            .jets
            .iter()
            .map(|jet| {
                let mut out = vec![ZERO; n + 1];
                let mut power = ONE;
                let mut factorial = 1.0;
                for (i, &v) in jet.values().iter().enumerate().take(n + 1) {
                    if i > 0 {
                        power *= delta;
                        factorial *= i as f64;
                    }
                    let g = v * power / factorial;
                    for (slot, &t) in out.iter_mut().zip(&matrix[i]) {
                        *slot += g * t;
                    }
                }
                let inv = ONE / delta;
                let mut power = ONE;
                let mut factorial = 1.0;
                for (j, slot) in out.iter_mut().enumerate() {
                    if j > 0 {
                        power *= inv;
                        factorial *= j as f64;
                    }
                    *slot *= power * factorial;
                }
                out
            })
            .collect())
    }
}

/// Map derivative mantissas at `at` to those at `at + delta`.
fn apply_transition(
    jet: &ScaledJet,
    matrix: &[Vec<Complex64>],
    delta: Complex64,
    next: Complex64,
) -> ScaledJet {
    let n = matrix.len() - 1;
    let mut power = ONE;
    let mut factorial = 1.0;
    let mut out = vec![ZERO; n + 1];
    for (i, &v) in jet.values().iter().enumerate().take(n + 1) {
        if i > 0 {
            power *= delta;
            factorial *= i as f64;
        }
        let g = v * power / factorial;
        for (slot, &t) in out.iter_mut().zip(&matrix[i]) {
            *slot += g * t;
        }
    }
    let inv = ONE / delta;
    let mut power = ONE;
    let mut factorial = 1.0;
    for (j, slot) in out.iter_mut().enumerate() {
        if j > 0 {
            power *= inv;
            factorial *= j as f64;
        }
        *slot *= power * factorial;
    }
    ScaledJet::new(out, jet.scale(), next).rescale()
}

/// Extend a jet of order `≥ n` to order `m` using the ODE.
fn extend_jet(ode: &OdeSystem, jet: &ScaledJet, m: usize) -> ScaledJet {
    let n = ode.n;
    if m <= n {
        return jet.truncated(m);
    }
    let c = taylor_coefficients(ode, jet.center(), &jet.values()[..=n], m + 1);
    let mut factorial = 1.0;
    let values = c
        .into_iter()
        .enumerate()
        .map(|(j, cj)| {
            if j > 0 {
                factorial *= j as f64;
            }
            cj * factorial
        })
        .collect();
    ScaledJet::new(values, jet.scale(), jet.center()).rescale()
}

/// Identity-initialized basis at 0 continued to `target`, jets of order `m`.
pub fn continue_basis(
    ode: &OdeSystem,
    target: Complex64,
    m: usize,
    tol: f64,
) -> Result<FundamentalBasis> {
    if m < ode.n + 1 {
        return Err(TodaError::InvalidInput(format!(
            "jet order {m} is below n+1 = {}",
            ode.n + 1
        )));
    }
    FundamentalBasis::identity(ode, m).advance(target, m, tol)
}

/// Difference of two angles reduced to `(-π, π]`.
pub fn phase_difference(a: f64, b: f64) -> f64 {
    wrap_phase(a - b)
}
