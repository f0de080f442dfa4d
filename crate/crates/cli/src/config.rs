//! JSON run configuration.

use serde::Deserialize;
use thiserror::Error;
use toda_core::random::{random_system, seeded_rng};
use toda_core::{Complex64, ComplexPoly, OdeSystem, DEFAULT_TOL};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("config error at `{path}`: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn at(path: &str, message: impl Into<String>) -> Self {
        ConfigError {
            path: path.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub center: [f64; 2],
    pub half_width: f64,
    pub samples_per_side: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            center: [0.0, 0.0],
            half_width: 3.0,
            samples_per_side: 21,
        }
    }
}

impl GridSpec {
    pub fn center(&self) -> Complex64 {
        Complex64::new(self.center[0], self.center[1])
    }

    /// Grid points, imaginary part in the outer loop, both ascending.
    pub fn points(&self) -> Vec<Complex64> {
        let s = self.samples_per_side;
        let coord = |c: f64, i: usize| {
            c - self.half_width + 2.0 * self.half_width * i as f64 / (s - 1) as f64
        };
        (0..s)
            .flat_map(|j| (0..s).map(move |i| (i, j)))
            .map(|(i, j)| Complex64::new(coord(self.center[0], i), coord(self.center[1], j)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub continuation: f64,
    pub stencil_h: f64,
    pub residual_pass: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            continuation: DEFAULT_TOL,
            stencil_h: 1e-3,
            residual_pass: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Quadrature {
    pub rings: usize,
    pub spokes: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            rings: 16,
            spokes: 128,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSpec {
    pub max_degree: usize,
    pub max_modulus: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n: usize,
    coefficients: Option<Vec<Vec<[f64; 2]>>>,
    random_system: Option<RandomSpec>,
    #[serde(default)]
    grid: GridSpec,
    #[serde(default = "default_radii")]
    radii: Vec<f64>,
    #[serde(default)]
    tolerances: Tolerances,
    #[serde(default)]
    quadrature: Quadrature,
    #[serde(rename = "K")]
    k: Option<f64>,
    #[serde(default = "default_window")]
    stokes_window: f64,
    #[serde(default = "default_seed")]
    seed: u64,
}

fn default_radii() -> Vec<f64> {
    (1..=20).map(f64::from).collect()
}

fn default_window() -> f64 {
    toda_core::verifier::STOKES_WINDOW
}

fn default_seed() -> u64 {
    42
}

/// Validated configuration with defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub system: OdeSystem,
    pub grid: GridSpec,
    pub radii: Vec<f64>,
    pub tolerances: Tolerances,
    pub quadrature: Quadrature,
    pub k: Option<f64>,
    pub stokes_window: f64,
    pub seed: u64,
}

pub fn parse_config(text: &[u8]) -> Result<RunConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_slice(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::at(&path, e.into_inner().to_string())
    })?;
    validate(raw)
}

fn validate(raw: RawConfig) -> Result<RunConfig, ConfigError> {
    let n = raw.n;
    if n == 0 {
        return Err(ConfigError::at("n", "n must be at least 1"));
    }
    let system = match (&raw.coefficients, &raw.random_system) {
        (Some(_), Some(_)) => {
            return Err(ConfigError::at(
                "random_system",
                "give either coefficients or random_system, not both",
            ))
        }
        (None, None) => {
            return Err(ConfigError::at(
                "coefficients",
                "missing field (or give random_system)",
            ))
        }
        (Some(coeffs), None) => {
            if coeffs.len() != n + 1 {
                return Err(ConfigError::at(
                    "coefficients",
                    format!("coefficients needs {} entries, got {}", n + 1, coeffs.len()),
                ));
            }
            let polys = coeffs
                .iter()
                .map(|p| {
                    ComplexPoly::new(p.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
                })
                .collect();
            OdeSystem::new(polys).map_err(|e| ConfigError::at("coefficients", e.to_string()))?
        }
        (None, Some(spec)) => {
            if !(spec.max_modulus > 0.0) {
                return Err(ConfigError::at(
                    "random_system.max_modulus",
                    "max_modulus must be positive",
                ));
            }
            random_system(
                &mut seeded_rng(raw.seed),
                n,
                spec.max_degree,
                spec.max_modulus,
            )
        }
    };
    let grid = raw.grid;
    if grid.samples_per_side < 2 {
        return Err(ConfigError::at(
            "grid.samples_per_side",
            "samples_per_side must be at least 2",
        ));
    }
    if !(grid.half_width > 0.0) {
        return Err(ConfigError::at(
            "grid.half_width",
            "half_width must be positive",
        ));
    }
    if raw.radii.is_empty() {
        return Err(ConfigError::at("radii", "radii must not be empty"));
    }
    if !(raw.radii[0] > 0.0) || raw.radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(ConfigError::at(
            "radii",
            "radii must be positive and strictly increasing",
        ));
    }
    let t = raw.tolerances;
    if !(t.continuation > 0.0 && t.continuation <= 1e-3) {
        return Err(ConfigError::at(
            "tolerances.continuation",
            "continuation must lie in (0, 1e-3]",
        ));
    }
    if !(t.stencil_h > 0.0) {
        return Err(ConfigError::at(
            "tolerances.stencil_h",
            "stencil_h must be positive",
        ));
    }
    if !(t.residual_pass > 0.0) {
        return Err(ConfigError::at(
            "tolerances.residual_pass",
            "residual_pass must be positive",
        ));
    }
    let q = raw.quadrature;
    if q.rings < 8 {
        return Err(ConfigError::at(
            "quadrature.rings",
            "rings must be at least 8",
        ));
    }
    if q.spokes < 8 {
        return Err(ConfigError::at(
            "quadrature.spokes",
            "spokes must be at least 8",
        ));
    }
    if let Some(k) = raw.k {
        if !(k > 0.0) {
            return Err(ConfigError::at("K", "K must be positive"));
        }
    }
    if !(raw.stokes_window > 0.0) {
        return Err(ConfigError::at(
            "stokes_window",
            "stokes_window must be positive",
        ));
    }
    Ok(RunConfig {
        n,
        system,
        grid,
        radii: raw.radii,
        tolerances: t,
        quadrature: q,
        k: raw.k,
        stokes_window: raw.stokes_window,
        seed: raw.seed,
    })
}
