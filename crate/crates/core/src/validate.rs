//! Self-validation suite behind `wspec validate`.
//!
//! Every check is deterministic (fixed grids, fixed seeds, fixed summation
//! order), so two runs produce byte-identical reports.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::fracops::{
    fractional_laplacian_singular, fractional_laplacian_spectral, weighted_fractional_integral,
    weighted_hilfer_derivative, FractionalOrder, HilferOrder, TimeSignal,
};
use crate::geometry::{build_grid, make_diffeomorphism, DeformedGrid, GeometrySpec, SpatialWeight, TemporalPair};
use crate::mellin::mellin_forward;
use crate::solver::{green_foxh_route, green_mellin_route, green_spectral_at, green_spectral_route, HilferProblem};
use crate::specfun::{gamma, gamma_complex, mittag_leffler_real};
use crate::uncertainty::{commutator_residual, dispersion_report};
use crate::wfourier::{forward, inverse, weighted_gradient, weighted_norm, GridFunction};

#[derive(Clone, Debug, Default)]
pub struct ValidateOptions {
    /// Only run checks whose name contains this substring.
    pub filter: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub residual: f64,
    pub limit: f64,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub version: &'static str,
    pub all_passed: bool,
    pub checks: Vec<CheckResult>,
    /// Pretty JSON rendering of the fields above.
    #[serde(skip)]
    pub text: String,
}

fn line_grid(name: &str, params: &[f64], half: f64, n: usize) -> Result<Arc<DeformedGrid>> {
    let d = make_diffeomorphism(GeometrySpec::catalog(name, params, 1))?;
    build_grid(&d, &[(-half, half)], &[n])
}

fn diff_norm(a: &GridFunction, b: &GridFunction, w: &SpatialWeight) -> Result<f64> {
    let d = a.combine(Complex64::new(1.0, 0.0), b, Complex64::new(-1.0, 0.0))?;
    Ok(weighted_norm(&d, w) / weighted_norm(b, w))
}

type Check = (&'static str, f64, fn() -> Result<(f64, String)>);

fn round_trip() -> Result<(f64, String)> {
    let g = line_grid("cubic", &[], 8.0, 256)?;
    let w = SpatialWeight::from_catalog("quadratic", &[1.0])?;
    let f = GridFunction::from_real_fn(&g, |x| (-x[0] * x[0]).exp() * (1.0 + x[0]));
    let back = inverse(&forward(&f, &w), &w, &g)?;
    Ok((diff_norm(&back, &f, &w)?, "cubic map, quadratic weight, N=256".into()))
}

fn plancherel() -> Result<(f64, String)> {
    let g = line_grid("sinh", &[0.5], 8.0, 256)?;
    let w = SpatialWeight::from_catalog("exp", &[0.2])?;
    let f = GridFunction::from_real_fn(&g, |x| (-x[0] * x[0]).exp());
    let a = weighted_norm(&f, &w).powi(2);
    let b = forward(&f, &w).norm_squared();
    Ok(((a - b).abs() / a, "sinh map, exponential weight".into()))
}

fn gradient() -> Result<(f64, String)> {
    let g = line_grid("cubic", &[], 10.0, 256)?;
    let w = SpatialWeight::one();
    let f = GridFunction::from_u_fn(&g, |u| Complex64::new((-0.5 * u[0] * u[0]).exp(), 0.0));
    let d = weighted_gradient(&f, &w, 0)?;
    let exact = GridFunction::from_u_fn(&g, |u| Complex64::new(-u[0] * (-0.5 * u[0] * u[0]).exp(), 0.0));
    Ok((diff_norm(&d, &exact, &w)?, "u-derivative of a Gaussian".into()))
}

fn mittag_leffler() -> Result<(f64, String)> {
    let a = (mittag_leffler_real(1.0, 1.0, -1.0)? - (-1f64).exp()).abs();
    let mut b = 0.0f64;
    for k in 0..=100 {
        let z = 0.1 * k as f64;
        b = b.max((mittag_leffler_real(2.0, 1.0, -z * z)? - z.cos()).abs());
    }
    Ok((a.max(b), format!("E11(-1) {a:.2e}, E21(-z^2) vs cos {b:.2e}")))
}

fn reflection() -> Result<(f64, String)> {
    let mut worst = 0.0f64;
    for k in 0..25 {
        let z = Complex64::new(-3.1 + 0.27 * k as f64, 2.3 - 0.19 * k as f64);
        let lhs = gamma_complex(z)? * gamma_complex(1.0 - z)?;
        let rhs = PI / (PI * z).sin();
        worst = worst.max((lhs - rhs).norm() / rhs.norm());
    }
    Ok((worst, "Gamma(z)Gamma(1-z) sin(pi z) = pi at 25 points".into()))
}

fn heat_kernel() -> Result<(f64, String)> {
    let p = HilferProblem::trivial(1, 1.0, 1.0, 1.0)?;
    let d = make_diffeomorphism(GeometrySpec::catalog("identity", &[], 1))?;
    let g = build_grid(&d, &[(-30.0, 30.0)], &[1024])?;
    let gf = green_spectral_route(&g, 1.0, &p)?;
    let mut worst = 0.0f64;
    for k in 0..g.len() {
        let x = g.x(k)[0];
        if x.abs() <= 5.0 {
            let exact = (4.0 * PI).powf(-0.5) * (-0.25 * x * x).exp();
            worst = worst.max((gf.values()[k].re - exact).abs() / exact);
        }
    }
    Ok((worst, "grid route vs (4 pi t)^(-1/2) exp(-x^2/4t), |x| <= 5".into()))
}

fn three_routes() -> Result<(f64, String)> {
    let mut worst = 0.0f64;
    for (alpha, beta, s) in [(1.0, 1.0, 1.0), (0.5, 0.5, 0.75), (1.5, 0.0, 0.5)] {
        let p = HilferProblem::trivial(1, alpha, beta, s)?;
        let contour = p.default_contour()?;
        for x in [0.5, 1.5] {
            let a = green_spectral_at(&[x], 1.0, &p)?.value;
            let b = green_mellin_route(&[x], 1.0, &p, &contour)?.value;
            let c = green_foxh_route(&[x], 1.0, &p)?.value;
            worst = worst.max(((a - b) / b).abs()).max(((c - b) / b).abs());
        }
    }
    Ok((worst, "spectral, Mellin and Fox-H routes at 3 parameter sets".into()))
}

fn hypersingular() -> Result<(f64, String)> {
    let g = line_grid("identity", &[], 12.0, 256)?;
    let w = SpatialWeight::one();
    let f = GridFunction::from_real_fn(&g, |x| (-x[0] * x[0]).exp());
    let a = fractional_laplacian_spectral(&f, &w, FractionalOrder::new(0.5)?)?;
    let b = fractional_laplacian_singular(&f, &w, 0.5)?;
    Ok((diff_norm(&b, &a, &w)?, "s = 0.5, N = 256".into()))
}

fn uncertainty() -> Result<(f64, String)> {
    let g = line_grid("identity", &[], 12.0, 512)?;
    let w = SpatialWeight::one();
    let f = GridFunction::from_real_fn(&g, |x| PI.powf(-0.25) * (-0.5 * x[0] * x[0]).exp());
    let r = dispersion_report(&f, &w)?;
    let comm = commutator_residual(&f, &w, 0, 0)?;
    Ok(((r.product - 0.5).abs().max(comm), format!("product {:.12}, commutator {comm:.2e}", r.product)))
}

fn power_rule() -> Result<(f64, String)> {
    let tp = TemporalPair::from_catalog("power", &[1.3], "exp", &[0.2], None)?;
    let psi = |t: f64| tp.gamma(t) / tp.rho(t);
    let v = weighted_fractional_integral(&psi, 0.5, &tp, 1.5)?;
    let exact = 1.0 / gamma(2.5)? * tp.gamma(1.5).powf(1.5) / tp.rho(1.5);
    Ok(((v - exact).abs() / exact, "I^0.5 of gamma/rho at t = 1.5".into()))
}

fn annihilation() -> Result<(f64, String)> {
    let tp = TemporalPair::from_catalog("expm1", &[0.5], "power", &[0.5], None)?;
    let signal = TimeSignal::new(|t: f64| 3.0 / tp.rho(t));
    let v = weighted_hilfer_derivative(&signal, HilferOrder::new(0.6, 1.0)?, &tp, 1.2)?;
    Ok((v.abs(), "Caputo-type derivative of const/rho".into()))
}

fn mellin_pairs() -> Result<(f64, String)> {
    let d = make_diffeomorphism(GeometrySpec::catalog("power", &[2.0], 1))?;
    let f = |x: f64| (-x * x).exp();
    let mut worst = 0.0f64;
    for s in [0.7, 1.3, 2.5] {
        let v = mellin_forward(&f, &d, &SpatialWeight::one(), Complex64::new(s, 0.0))?;
        worst = worst.max((v.re - gamma(s)?).abs());
    }
    Ok((worst, "phi = x^2, f = exp(-x^2) reproduces Gamma(s)".into()))
}

const CHECKS: [Check; 12] = [
    ("transform round trip", 1e-10, round_trip),
    ("plancherel", 1e-8, plancherel),
    ("gradient diagonalization", 1e-9, gradient),
    ("mittag-leffler limits", 1e-10, mittag_leffler),
    ("gamma reflection", 1e-11, reflection),
    ("heat kernel", 1e-6, heat_kernel),
    ("three-route agreement", 1e-4, three_routes),
    ("hypersingular laplacian", 5e-2, hypersingular),
    ("uncertainty minimizer", 1e-6, uncertainty),
    ("fractional power rule", 1e-7, power_rule),
    ("caputo annihilation", 1e-8, annihilation),
    ("mellin golden pairs", 1e-8, mellin_pairs),
];

/// Runs the suite. Numerical errors inside a check count as failures of that
/// check, not of the run.
pub fn validation_report(opts: &ValidateOptions) -> Result<ValidationReport> {
    let mut checks = Vec::new();
    for (name, limit, run) in CHECKS {
        if let Some(filter) = &opts.filter {
            if !name.contains(filter.as_str()) {
                continue;
            }
        }
        let (residual, detail) = match run() {
            Ok(r) => r,
            Err(e) => (f64::INFINITY, format!("error: {e}")),
        };
        checks.push(CheckResult {
            name,
            residual,
            limit,
            passed: residual <= limit,
            detail,
        });
    }
    let all_passed = checks.iter().all(|c| c.passed);
    let mut report = ValidationReport {
        version: env!("CARGO_PKG_VERSION"),
        all_passed,
        checks,
        text: String::new(),
    };
    // Infinite residuals are not representable in JSON; they become null.
    report.text = serde_json::to_string_pretty(&report).map_err(|e| crate::error::Error::Validation(e.to_string()))?;
    report.text.push('\n');
    Ok(report)
}
