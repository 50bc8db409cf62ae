//! Weighted γ-fractional integrals, Hilfer derivatives and the generalized
//! Laplace transform that diagonalizes them.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::TemporalPair;
use crate::quad::{integrate_with_breaks, tanh_sinh_weighted, ErrorTrap, QuadResult, Tolerance};
use crate::specfun::gamma;

use super::HilferOrder;

const RIEMANN_TOL: Tolerance = Tolerance::new(1e-13, 1e-13).with_max_intervals(2000);
const OUTER_TOL: Tolerance = Tolerance::new(1e-10, 1e-10).with_max_intervals(400);
const FD_STEP_FIRST: f64 = 1e-3;
const FD_STEP_SECOND: f64 = 1e-2;
const HEAD_CUTOFF: f64 = 1e-150;

type Signal<'a> = Box<dyn Fn(f64) -> f64 + 'a>;

/// A function of time, optionally with its derivative.
pub struct TimeSignal<'a> {
    value: Signal<'a>,
    derivative: Option<Signal<'a>>,
}

impl<'a> TimeSignal<'a> {
    pub fn new(value: impl Fn(f64) -> f64 + 'a) -> Self {
        TimeSignal {
            value: Box::new(value),
            derivative: None,
        }
    }

    pub fn with_derivative(value: impl Fn(f64) -> f64 + 'a, derivative: impl Fn(f64) -> f64 + 'a) -> Self {
        TimeSignal {
            value: Box::new(value),
            derivative: Some(Box::new(derivative)),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.value)(t)
    }

    pub fn derivative(&self, t: f64) -> Option<f64> {
        self.derivative.as_ref().map(|d| d(t))
    }
}

// J^a_γ φ(t) = (1/Γ(a)) ∫_0^Δ (Δ - v)^{a-1} φ(γ⁻¹(γ(0) + v)) dv with
// Δ = γ(t) - γ(0). Tanh-sinh sees the exact distance Δ - v, so the kernel
// singularity costs nothing extra.
fn gamma_integral(
    phi: &dyn Fn(f64) -> Result<f64>,
    a: f64,
    tp: &TemporalPair,
    t: f64,
    tol: Tolerance,
    accept: f64,
) -> Result<f64> {
    if a == 0.0 {
        return phi(t);
    }
    let g0 = tp.gamma(0.0);
    let span = tp.gamma(t) - g0;
    // Nodes next to τ = 0 can underflow γ(τ) - γ(0); J^a with a > 0 vanishes
    // there for integrable φ.
    if span == 0.0 && t > 0.0 {
        return Ok(0.0);
    }
    if !(span > 0.0) {
        return Err(Error::invalid(format!("gamma(t) - gamma(0) must be positive at t={t}")));
    }
    let trap = ErrorTrap::new();
    let r = tanh_sinh_weighted(
        |node| {
            let tau = tp.gamma_inverse(g0 + node.from_a).max(f64::MIN_POSITIVE);
            let kernel = node.weight * node.to_b.powf(a - 1.0);
            if kernel == 0.0 {
                0.0
            } else {
                kernel * trap.catch(phi(tau))
            }
        },
        0.0,
        span,
        tol,
    );
    trap.check()?;
    if !r.converged && !(r.error <= accept * r.value.abs().max(1.0)) {
        return Err(Error::no_convergence(
            "weighted fractional integral",
            format!("error estimate {:e} at t={t}", r.error),
        ));
    }
    Ok(r.value / gamma(a)?)
}

/// I^a_{γ,ρ} ψ(t) = ρ(t)⁻¹ J^a_γ (ρψ)(t) for a ≥ 0, t > 0.
pub fn weighted_fractional_integral(psi: &dyn Fn(f64) -> f64, a: f64, tp: &TemporalPair, t: f64) -> Result<f64> {
    if !(a >= 0.0) {
        return Err(Error::invalid(format!("integral order must be non-negative, got {a}")));
    }
    if !(t > 0.0) {
        return Err(Error::invalid(format!("time must be positive, got {t}")));
    }
    let weighted = |tau: f64| Ok(tp.rho(tau) * psi(tau));
    let v = gamma_integral(&weighted, a, tp, t, RIEMANN_TOL, 1e-10)?;
    Ok(v / tp.rho(t))
}

// Fourth-order central difference in y = ln τ, so the stencil stays inside
// (0, ∞) for every τ > 0.
fn log_derivative(f: &dyn Fn(f64) -> Result<f64>, tau: f64, step: f64) -> Result<f64> {
    let y = tau.ln();
    let at = |k: f64| f((y + k * step).exp());
    let d = (at(-2.0)? - 8.0 * at(-1.0)? + 8.0 * at(1.0)? - at(2.0)?) / (12.0 * step);
    Ok(d / tau)
}

/// Weighted Hilfer derivative D^{α,β}_{γ,ρ} ψ(t) = ρ⁻¹ J^{β(m-α)}_γ D_γ^m J^{(1-β)(m-α)}_γ (ρψ),
/// with D_γ = (1/γ') d/dt.
///
/// Derivatives are fourth-order log-scale differences; when the inner
/// integral vanishes (β = 1, m = 1) and ψ' is supplied the product rule is
/// used instead.
pub fn weighted_hilfer_derivative(
    psi: &TimeSignal<'_>,
    order: HilferOrder,
    tp: &TemporalPair,
    t: f64,
) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::invalid(format!("time must be positive, got {t}")));
    }
    let inner_order = order.inner_order();
    let outer_order = order.outer_order();
    let m = order.m();
    let weighted = |tau: f64| Ok(tp.rho(tau) * psi.value(tau));
    let inner = |tau: f64| gamma_integral(&weighted, inner_order, tp, tau, RIEMANN_TOL, 1e-10);
    let first_step = if m == 1 { FD_STEP_FIRST } else { FD_STEP_SECOND };
    let first = |tau: f64| -> Result<f64> {
        let analytic = if inner_order == 0.0 {
            psi.derivative(tau)
                .map(|dp| tp.rho_prime(tau) * psi.value(tau) + tp.rho(tau) * dp)
        } else {
            None
        };
        let d = match analytic {
            Some(d) => d,
            None => log_derivative(&inner, tau, first_step)?,
        };
        Ok(d / tp.gamma_prime(tau))
    };
    let top = |tau: f64| -> Result<f64> {
        if m == 1 {
            first(tau)
        } else {
            Ok(log_derivative(&first, tau, FD_STEP_SECOND)? / tp.gamma_prime(tau))
        }
    };
    let v = if outer_order == 0.0 {
        top(t)?
    } else {
        gamma_integral(&top, outer_order, tp, t, OUTER_TOL, 1e-6)?
    };
    Ok(v / tp.rho(t))
}

/// L_{γ,ρ}[ψ](z) = ∫_0^∞ e^{-zγ(t)} ρ(t) ψ(t) γ'(t) dt, truncated at `horizon`
/// after checking that the neglected tail is below 1e-10.
pub fn generalized_laplace(
    psi: &dyn Fn(f64) -> f64,
    tp: &TemporalPair,
    z: Complex64,
    horizon: f64,
) -> Result<Complex64> {
    generalized_laplace_with(psi, tp, z, horizon, Tolerance::new(1e-13, 1e-12).with_max_intervals(8000))
}

/// As [`generalized_laplace`] with a caller-chosen tolerance, for signals
/// that are themselves only known to a few digits.
pub fn generalized_laplace_with(
    psi: &dyn Fn(f64) -> f64,
    tp: &TemporalPair,
    z: Complex64,
    horizon: f64,
    tol: Tolerance,
) -> Result<Complex64> {
    if !(z.re > 0.0) {
        return Err(Error::invalid("generalized Laplace transform needs Re z > 0"));
    }
    let g0 = tp.gamma(0.0);
    let top = tp.gamma(horizon) - g0;
    if !(top > 0.0) {
        return Err(Error::invalid("horizon must be positive"));
    }
    let tail = (-z.re * top).exp() * (tp.rho(horizon) * psi(horizon)).abs() / z.re;
    if !(tail <= 1e-10) {
        return Err(Error::Divergence(format!(
            "Laplace tail estimate {tail:e} beyond horizon {horizon}; increase it"
        )));
    }
    let weighted = |u: f64| {
        let tau = tp.gamma_inverse(g0 + u).max(f64::MIN_POSITIVE);
        (-z * u).exp() * (tp.rho(tau) * psi(tau))
    };
    // Tanh-sinh absorbs the endpoint behaviour on the first unit of γ, linear
    // breaks resolve the decay and oscillation beyond it.
    let first = top.min(1.0);
    // Nodes closer to u = 0 than HEAD_CUTOFF · first are dropped: an
    // integrable u^{-κ} loses at most that power of (1 - κ) there, while the
    // signals themselves often stop being representable.
    let head = tanh_sinh_weighted(
        |n| {
            if n.from_a < HEAD_CUTOFF * first {
                Complex64::default()
            } else {
                weighted(n.x) * n.weight
            }
        },
        0.0,
        first,
        tol,
    );
    let mut breaks = vec![first];
    let width = (2.0 / z.re).min(if z.im != 0.0 { 2.0 * std::f64::consts::PI / z.im.abs() } else { f64::INFINITY });
    let mut x = first;
    while x < top && breaks.len() < 400 {
        x = (x + width).min(top);
        breaks.push(x);
    }
    if *breaks.last().unwrap() < top {
        breaks.push(top);
    }
    let body = if breaks.len() > 1 {
        integrate_with_breaks(weighted, &breaks, tol)
    } else {
        QuadResult { value: Complex64::default(), error: 0.0, intervals: 0, converged: true }
    };
    let value = head.value + body.value;
    let limit = 10.0 * tol.abs.max(tol.rel * value.norm());
    for (part, r) in [("head", (head.error, head.converged)), ("body", (body.error, body.converged))] {
        if !r.1 && !(r.0 <= limit) {
            return Err(Error::no_convergence("generalized Laplace", format!("{part} error estimate {:e}", r.0)));
        }
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma;

    fn power_rho() -> TemporalPair {
        TemporalPair::from_catalog("power", &[1.5], "exp", &[0.3], None).unwrap()
    }

    #[test]
    fn integral_of_gamma_power() {
        // I^a (ρ⁻¹ γ^k) = Γ(k+1)/Γ(k+1+a) ρ⁻¹ γ^{k+a}.
        let tp = power_rho();
        for (a, k) in [(0.5, 1.0), (0.3, 0.0), (1.2, 2.5)] {
            let psi = |t: f64| tp.gamma(t).powf(k) / tp.rho(t);
            for t in [0.4, 1.0, 2.3] {
                let v = weighted_fractional_integral(&psi, a, &tp, t).unwrap();
                let exact = gamma(k + 1.0).unwrap() / gamma(k + 1.0 + a).unwrap() * tp.gamma(t).powf(k + a) / tp.rho(t);
                assert!((v - exact).abs() < 1e-10 * exact.abs().max(1.0), "a={a} k={k} t={t}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn hilfer_of_gamma_power() {
        // D^{α,β} (ρ⁻¹ γ^k) = Γ(k+1)/Γ(k+1-α) ρ⁻¹ γ^{k-α} for k > μ - 1.
        let tp = power_rho();
        for (alpha, beta, k) in [(0.5, 0.0, 1.0), (0.5, 0.5, 2.0), (0.7, 1.0, 1.5), (1.5, 0.3, 2.0)] {
            let order = HilferOrder::new(alpha, beta).unwrap();
            let psi = TimeSignal::new(|t: f64| tp.gamma(t).powf(k) / tp.rho(t));
            for t in [0.5, 1.3] {
                let v = weighted_hilfer_derivative(&psi, order, &tp, t).unwrap();
                let exact = gamma(k + 1.0).unwrap() / gamma(k + 1.0 - alpha).unwrap() * tp.gamma(t).powf(k - alpha)
                    / tp.rho(t);
                assert!((v - exact).abs() < 1e-6 * exact.abs().max(1.0), "{alpha} {beta} {k} {t}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn analytic_derivative_path() {
        let tp = TemporalPair::from_catalog("identity", &[], "exp", &[0.5], None).unwrap();
        let order = HilferOrder::new(1.0, 1.0).unwrap();
        let psi = TimeSignal::with_derivative(|t: f64| t.sin(), |t: f64| t.cos());
        let v = weighted_hilfer_derivative(&psi, order, &tp, 0.8).unwrap();
        // ρ⁻¹ d/dt(ρψ) = ψ' + 0.5 ψ
        assert!((v - (0.8f64.cos() + 0.5 * 0.8f64.sin())).abs() < 1e-14);
    }

    #[test]
    fn laplace_of_exponential() {
        let tp = TemporalPair::from_catalog("expm1", &[1.0], "one", &[], None).unwrap();
        // ψ = e^{-γ} gives 1/(z+1).
        let psi = |t: f64| (-tp.gamma(t)).exp();
        let z = Complex64::new(0.7, 1.3);
        let v = generalized_laplace(&psi, &tp, z, 4.0).unwrap();
        let exact = 1.0 / (z + 1.0);
        assert!((v - exact).norm() < 1e-10);
        assert!(matches!(generalized_laplace(&psi, &tp, z, 0.5), Err(Error::Divergence(_))));
    }
}
