use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = TodaError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TodaError {
    /// The leading mantissa of a divisor jet is zero: the quotient has a pole
    /// at the jet center.
    #[error("jet division by zero at {center}")]
    DivisionByZeroJet { center: Complex64 },

    #[error("continuation step fell below {min_step:e} at {at}")]
    StepUnderflow { at: Complex64, min_step: f64 },

    #[error("series truncation error never dropped below {tol:e} at {at}")]
    ToleranceUnachievable { at: Complex64, tol: f64 },

    /// `F_k(at) = 0`: the curve is ramified at `at`.
    #[error("derived curve F_{k} vanishes at {at} (ramified point)")]
    RamifiedPoint { k: usize, at: Complex64 },

    #[error("f' vanishes at {at} (critical point)")]
    CriticalPoint { at: Complex64 },

    #[error("fractional-linear map has a pole at {at}")]
    PoleAt { at: Complex64 },

    #[error("fractional-linear map is degenerate (ad - bc = 0)")]
    DegenerateMobius,

    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("density exponent {exponent} at {at} is outside the representable range")]
    QuadratureOverflow { at: Complex64, exponent: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
