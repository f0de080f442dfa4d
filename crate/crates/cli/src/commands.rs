//! The five subcommands. Each returns its output as text so that nothing
//! is printed when a command fails part way.

use std::fmt::Write;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;
use toda_core::verifier::{
    check_growth_bound, check_point, growth_functions_with_tol, stokes_asymptotics_check_with,
    GrowthCurve, PointCheck,
};
use toda_core::{newton_diagram, toda_point, Complex64, TodaError};

use crate::config::{ConfigError, RunConfig};
use crate::format::g17;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Runtime(String),
}

impl From<TodaError> for CliError {
    fn from(e: TodaError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

/// Text produced by a command. `summary` is JSON that goes either after the
/// CSV on standard output or into the `--summary` file.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub body: String,
    pub summary: Option<String>,
    pub pass: bool,
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable report")
}

pub fn grid(config: &RunConfig) -> Result<Output, CliError> {
    let tol = config.tolerances.continuation;
    let rows = config
        .grid
        .points()
        .into_par_iter()
        .map(|z| toda_point(&config.system, z, tol))
        .collect::<Result<Vec<_>, _>>()?;
    let mut body = String::from("re,im");
    for j in 1..=config.n {
        write!(body, ",u{j}").unwrap();
    }
    body.push('\n');
    for row in rows {
        body.push_str(&g17(row.at.re));
        body.push(',');
        body.push_str(&g17(row.at.im));
        for u in row.u {
            body.push(',');
            body.push_str(&g17(u));
        }
        body.push('\n');
    }
    Ok(Output {
        body,
        summary: None,
        pass: true,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub toda_max_residual: f64,
    pub plucker_max_residual: f64,
    pub abel_max_error: f64,
    pub pass: bool,
}

/// Residual checks at the grid points inside the inscribed disc
/// `|z - center| ≤ half_width`.
pub fn verify_report(config: &RunConfig, perturb: f64) -> Result<VerifyReport, CliError> {
    let t = config.tolerances;
    let center = config.grid.center();
    let points: Vec<Complex64> = config
        .grid
        .points()
        .into_iter()
        .filter(|z| (z - center).norm() <= config.grid.half_width * (1.0 + 1e-12))
        .collect();
    let checks = points
        .into_par_iter()
        .map(|z| check_point(&config.system, z, t.stencil_h, t.continuation, perturb))
        .collect::<Result<Vec<PointCheck>, _>>()?;
    let max = |f: &dyn Fn(&PointCheck) -> f64| {
        checks.iter().map(f).fold(
            0.0,
            |m: f64, v| if v.is_nan() { f64::NAN } else { m.max(v) },
        )
    };
    let toda = max(&|c| c.toda_max());
    let plucker = max(&|c| c.plucker_max());
    let abel = max(&|c| c.abel_error);
    let limit = t.residual_pass;
    Ok(VerifyReport {
        toda_max_residual: toda,
        plucker_max_residual: plucker,
        abel_max_error: abel,
        pass: toda < limit && plucker < limit && abel < limit,
    })
}

pub fn verify(config: &RunConfig, perturb: f64) -> Result<Output, CliError> {
    let report = verify_report(config, perturb)?;
    Ok(Output {
        body: to_json(&report) + "\n",
        summary: None,
        pass: report.pass,
    })
}

fn curve(config: &RunConfig) -> Result<GrowthCurve, CliError> {
    let q = config.quadrature;
    Ok(growth_functions_with_tol(
        &config.system,
        &config.radii,
        q.rings,
        q.spokes,
        config.tolerances.continuation,
    )?)
}

pub fn order(config: &RunConfig) -> Result<Output, CliError> {
    let diagram = newton_diagram(&config.system);
    let curve = curve(config)?;
    let k_check = config.k.map(|k| check_growth_bound(&curve, k).holds);
    let report = json!({
        "lambda": diagram.order.to_string(),
        "diagram": diagram,
        "fitted": curve.fitted_order,
        "converged": curve.converged,
        "K_check": k_check,
    });
    Ok(Output {
        body: to_json(&report) + "\n",
        summary: None,
        pass: true,
    })
}

pub fn growth(config: &RunConfig) -> Result<Output, CliError> {
    let curve = curve(config)?;
    let mut body = String::from("r,A,B\n");
    for ((r, a), b) in curve.radii.iter().zip(&curve.a).zip(&curve.b) {
        writeln!(body, "{},{},{}", g17(*r), g17(*a), g17(*b)).unwrap();
    }
    let bound = config.k.map(|k| check_growth_bound(&curve, k));
    let summary = json!({
        "fitted_order": curve.fitted_order,
        "converged": curve.converged,
        "refinement_change": curve.refinement_change,
        "K_check": bound,
    });
    Ok(Output {
        body,
        summary: Some(to_json(&summary) + "\n"),
        pass: true,
    })
}

pub const STOKES_GUARD: &str = "Stokes analysis requires n=1, P≠0";

pub fn stokes(config: &RunConfig) -> Result<Output, CliError> {
    let ode = &config.system;
    if config.n != 1 || ode.coefficient(0).is_zero() || !ode.coefficient(1).is_zero() {
        return Err(CliError::Runtime(STOKES_GUARD.into()));
    }
    // w'' + P_0 w = 0 is the Liouville system of P = 2 P_0
    let p = ode.coefficient(0).scaled(Complex64::new(2.0, 0.0));
    let report = stokes_asymptotics_check_with(
        &p,
        &config.radii,
        config.stokes_window,
        config.tolerances.continuation,
    )?;
    let mut body = String::from("theta,r,u,diagnostic\n");
    for ray in &report.rays {
        for ((r, u), d) in report.radii.iter().zip(&ray.u).zip(&ray.diagnostic) {
            writeln!(
                body,
                "{},{},{},{}",
                g17(ray.theta),
                g17(*r),
                g17(*u),
                g17(*d)
            )
            .unwrap();
        }
    }
    let rays: Vec<_> = report
        .rays
        .iter()
        .map(|r| json!({"theta": r.theta, "kind": r.kind, "pass": r.pass, "diagnostic_range": r.range}))
        .collect();
    let summary = json!({
        "degree": report.geometry.degree,
        "leading": [report.geometry.leading.re, report.geometry.leading.im],
        "window": report.window,
        "top_half_from": report.top_half_from,
        "rays": rays,
        "pass": report.pass,
    });
    Ok(Output {
        body,
        summary: Some(to_json(&summary) + "\n"),
        pass: report.pass,
    })
}
