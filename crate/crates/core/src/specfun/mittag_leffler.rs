//! Two-parameter Mittag-Leffler function
//!
//! E_{α,μ}(z) = Σ_{k≥0} z^k / Γ(αk + μ),  0 < α ≤ 2,  μ > 0.
//!
//! Evaluation tries, in order: the Taylor series (|z| ≤ 5 and only when
//! cancellation stays harmless), the large-argument expansion, the
//! Mellin–Barnes integral over a vertical line, and finally a Laplace
//! inversion along two rays out of the origin.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::gamma::{ln_gamma, ln_gamma_complex, ln_sin_pi, rgamma};
use crate::error::{Error, Result};
use crate::quad::{integrate_with_breaks, Tolerance};

const SERIES_RADIUS: f64 = 5.0;
const MAX_SERIES_TERMS: usize = 2000;
const LN_PI: f64 = 1.144_729_885_849_400_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MlfMethod {
    Origin,
    Series,
    Asymptotic,
    MellinBarnes,
    Wedge,
}

impl MlfMethod {
    pub fn name(self) -> &'static str {
        match self {
            MlfMethod::Origin => "origin",
            MlfMethod::Series => "series",
            MlfMethod::Asymptotic => "asymptotic",
            MlfMethod::MellinBarnes => "mellin-barnes",
            MlfMethod::Wedge => "wedge",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MlfEvaluation {
    pub value: Complex64,
    pub error_estimate: f64,
    pub method: MlfMethod,
}

/// E_{α,μ}(z).
pub fn mittag_leffler(alpha: f64, mu: f64, z: Complex64) -> Result<Complex64> {
    mittag_leffler_detailed(alpha, mu, z).map(|e| e.value)
}

/// E_{α,μ}(x) for real x, returning the real part.
pub fn mittag_leffler_real(alpha: f64, mu: f64, x: f64) -> Result<f64> {
    mittag_leffler(alpha, mu, Complex64::new(x, 0.0)).map(|v| v.re)
}

/// E_{α,μ}(z) together with the method used and an error estimate.
pub fn mittag_leffler_detailed(alpha: f64, mu: f64, z: Complex64) -> Result<MlfEvaluation> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 2], got {alpha}")));
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::invalid(format!("mu must be positive, got {mu}")));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::invalid("Mittag-Leffler argument is not finite"));
    }
    if z.norm() == 0.0 {
        return Ok(MlfEvaluation {
            value: Complex64::new(rgamma(mu), 0.0),
            error_estimate: 0.0,
            method: MlfMethod::Origin,
        });
    }
    if z.norm() <= SERIES_RADIUS {
        if let Some((value, err)) = series(alpha, mu, z) {
            return Ok(MlfEvaluation {
                value,
                error_estimate: err,
                method: MlfMethod::Series,
            });
        }
    }
    if let Some((value, err)) = asymptotic(alpha, mu, z) {
        return Ok(MlfEvaluation {
            value,
            error_estimate: err,
            method: MlfMethod::Asymptotic,
        });
    }
    if let Some((value, err)) = vertical_line(alpha, mu, z) {
        return Ok(MlfEvaluation {
            value,
            error_estimate: err,
            method: MlfMethod::MellinBarnes,
        });
    }
    let (value, err) = wedge(alpha, mu, z)?;
    if !(value.re.is_finite() && value.im.is_finite()) || err > 1e-9 * value.norm().max(1.0) {
        return Err(Error::no_convergence(
            "mittag_leffler",
            format!("alpha={alpha}, mu={mu}, z={z}: ray integral error {err:e}"),
        ));
    }
    Ok(MlfEvaluation {
        value,
        error_estimate: err,
        method: MlfMethod::Wedge,
    })
}

fn series(alpha: f64, mu: f64, z: Complex64) -> Option<(Complex64, f64)> {
    let r = z.norm();
    let unit = z / r;
    let ln_r = r.ln();
    let mut phase = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut max_term = 0.0f64;
    let mut prev = f64::INFINITY;
    for k in 0..MAX_SERIES_TERMS {
        let log_mag = k as f64 * ln_r - ln_gamma(alpha * k as f64 + mu);
        let mag = log_mag.exp();
        sum += phase * mag;
        max_term = max_term.max(mag);
        if k > 0 && log_mag < prev && mag <= 1e-17 * sum.norm().max(1.0) {
            let rounding = max_term * f64::EPSILON * ((k + 1) as f64).sqrt();
            let err = rounding + mag;
            if err > 1e-11 * sum.norm().max(1.0) {
                return None;
            }
            return Some((sum, err));
        }
        prev = log_mag;
        phase *= unit;
    }
    None
}

fn asymptotic(alpha: f64, mu: f64, z: Complex64) -> Option<(Complex64, f64)> {
    let r = z.norm();
    let theta = z.arg();
    let ln_r = r.ln();
    let rho = r.powf(1.0 / alpha);
    // Choose the truncation from an envelope of |z^{-k} / Γ(μ - αk)|.
    let envelope = |k: usize| -> f64 {
        let x = alpha * k as f64 - mu;
        if x >= 0.0 {
            (ln_gamma(1.0 + x) - k as f64 * ln_r).exp() / PI
        } else {
            rgamma(mu - alpha * k as f64).abs() * (-(k as f64) * ln_r).exp()
        }
    };
    let mut best_k = 1;
    let mut best_env = envelope(1);
    for k in 2..=400 {
        let e = envelope(k);
        if e < best_env {
            best_env = e;
            best_k = k;
        } else if e > 10.0 * best_env {
            break;
        }
        if best_env < 1e-300 {
            break;
        }
    }
    let mut value = Complex64::new(0.0, 0.0);
    let zinv = 1.0 / z;
    let mut zpow = Complex64::new(1.0, 0.0);
    for k in 1..best_k {
        zpow *= zinv;
        value -= zpow * rgamma(mu - alpha * k as f64);
    }
    let ln_rho = rho.ln();
    for j in -3i32..=3 {
        let th = (theta + 2.0 * PI * j as f64) / alpha;
        if th.abs() >= PI {
            continue;
        }
        let s = Complex64::from_polar(rho, th);
        if s.re > 700.0 {
            return None;
        }
        let ln_s = Complex64::new(ln_rho, th);
        value += ((1.0 - mu) * ln_s + s).exp() / alpha;
    }
    let stokes = (-rho).exp() * rho.powf((1.0 - mu).abs()) * 10.0;
    let err = best_env + stokes;
    let scale = value.norm().max(1.0);
    if !(value.re.is_finite() && value.im.is_finite()) || err > 1e-12 * scale {
        return None;
    }
    Some((value, err))
}

// (1/2πi) ∫ Γ(ζ)Γ(1-ζ) / Γ(μ - αζ) (-z)^{-ζ} dζ along Re ζ = 1/2.
fn vertical_line(alpha: f64, mu: f64, z: Complex64) -> Option<(Complex64, f64)> {
    let w = -z;
    let lw = w.ln();
    let margin = PI * (1.0 - 0.5 * alpha) - lw.im.abs();
    if margin < 0.15 {
        return None;
    }
    let c = 0.5;
    let integrand = |tau: f64| -> Complex64 {
        let zeta = Complex64::new(c, tau);
        (LN_PI - ln_sin_pi(zeta) - ln_gamma_complex(mu - alpha * zeta) - zeta * lw).exp()
    };
    let power = (alpha * c + 0.5 - mu).max(0.0);
    let scale = (2.0 * PI).sqrt() * (-c * lw.re).exp() / margin;
    let mut t_max = 40.0 / margin;
    for _ in 0..6 {
        t_max = ((scale / 1e-17).ln().max(1.0) + power * (1.0 + alpha * t_max).ln()) / margin;
    }
    let h = 0.1;
    let n = (t_max / h).ceil() as i64;
    let mut coarse = integrand(0.0);
    for j in 1..=n {
        let tau = j as f64 * h;
        coarse += integrand(tau) + integrand(-tau);
    }
    let mut fine = coarse;
    for j in 0..n {
        let tau = (j as f64 + 0.5) * h;
        fine += integrand(tau) + integrand(-tau);
    }
    let coarse = coarse * (h / (2.0 * PI));
    let fine = fine * (0.5 * h / (2.0 * PI));
    let err = (fine - coarse).norm();
    if !(fine.re.is_finite() && fine.im.is_finite()) || err > 1e-11 * fine.norm().max(1.0) {
        return None;
    }
    Some((fine, err))
}

// Hankel-type inversion of s^{α-μ} / (s^α - z) deformed onto the rays
// arg s = ±ψ, with the residues of the poles inside the wedge added back.
fn wedge(alpha: f64, mu: f64, z: Complex64) -> Result<(Complex64, f64)> {
    if mu >= 1.0 + alpha {
        // E_{α,μ}(z) = (E_{α,μ-α}(z) - 1/Γ(μ-α)) / z keeps the ray integrand
        // integrable at the origin.
        let inner = mittag_leffler_detailed(alpha, mu - alpha, z)?;
        let value = (inner.value - rgamma(mu - alpha)) / z;
        return Ok((value, inner.error_estimate / z.norm()));
    }
    let r = z.norm();
    let theta = z.arg();
    let rho = r.powf(1.0 / alpha);
    let pole_args: Vec<f64> = (-3i32..=3)
        .map(|j| (theta + 2.0 * PI * j as f64) / alpha)
        .filter(|th| th.abs() <= PI + 1e-12)
        .collect();

    let mut psi = PI;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=45 {
        let cand = 0.55 * PI + i as f64 * (0.45 * PI / 45.0);
        let score = pole_args
            .iter()
            .map(|th| (th.abs() - cand).abs())
            .fold(f64::INFINITY, f64::min);
        if score >= best {
            best = score;
            psi = cand;
        }
    }

    let mut residues = Complex64::new(0.0, 0.0);
    for th in pole_args.iter().filter(|th| th.abs() < psi) {
        let s = Complex64::from_polar(rho, *th);
        let ln_s = Complex64::new(rho.ln(), *th);
        residues += ((1.0 - mu) * ln_s + s).exp() / alpha;
    }

    let on_ray = |rr: f64, th: f64| -> Complex64 {
        let s = Complex64::from_polar(rr, th);
        let s_alpha = Complex64::from_polar(rr.powf(alpha), alpha * th);
        let s_num = Complex64::from_polar(rr.powf(alpha - mu), (alpha - mu) * th);
        s.exp() * s_num / (s_alpha - z) * Complex64::from_polar(1.0, th)
    };
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let integrand = |rr: f64| -> Complex64 { (on_ray(rr, psi) - on_ray(rr, -psi)) / two_pi_i };

    let decay = -psi.cos();
    let upper = 2.0 * rho + 1.0 + (45.0 + (1.0 + rho).ln()) / decay;
    let mut breaks = vec![0.0, 0.5 * rho, rho, 1.5 * rho, 2.0 * rho, upper];
    breaks.retain(|b| *b <= upper);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let res = integrate_with_breaks(
        integrand,
        &breaks,
        Tolerance::new(1e-14, 1e-13).with_max_intervals(3000),
    );
    Ok((residues + res.value, res.error + 1e-15 * residues.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(alpha: f64, mu: f64, x: f64) -> MlfEvaluation {
        mittag_leffler_detailed(alpha, mu, Complex64::new(x, 0.0)).unwrap()
    }

    #[test]
    fn exponential_and_cosine() {
        assert!((e(1.0, 1.0, -1.0).value.re - (-1f64).exp()).abs() < 1e-14);
        assert!((e(2.0, 1.0, -4.0).value.re - 2f64.cos()).abs() < 1e-13);
        for x in [-7.0, -20.0, -60.0, 8.0] {
            let v = e(1.0, 1.0, x).value.re;
            assert!((v - x.exp()).abs() <= 1e-12 * x.exp().max(1.0), "x={x} v={v}");
        }
    }

    #[test]
    fn every_tier_agrees_with_closed_forms() {
        // E_{1,2}(z) = (e^z - 1)/z, E_{2,2}(-x²) = sin x / x.
        for x in [-3.0, -12.0, -40.0] {
            let v = e(1.0, 2.0, x).value.re;
            assert!((v - (x.exp() - 1.0) / x).abs() < 1e-12, "x={x}");
        }
        for x in [1.5f64, 4.0, 9.0, 25.0] {
            let r = e(2.0, 2.0, -x * x);
            assert!((r.value.re - x.sin() / x).abs() < 1e-11, "x={x} {:?}", r.method);
        }
        // E_{1/2,1}(-x) = e^{x²} erfc(x); check against a tabulated value:
        // e^{4} erfc(2) = 0.2553956763105057
        let v = e(0.5, 1.0, -2.0).value.re;
        assert!((v - 0.255_395_676_310_505_7).abs() < 1e-12, "{v}");
    }

    #[test]
    fn tiers_overlap_consistently() {
        let z = Complex64::new(-4.5, 0.0);
        let s = series(1.5, 1.2, z).unwrap().0;
        let w = wedge(1.5, 1.2, z).unwrap().0;
        let m = vertical_line(1.5, 1.2, z).unwrap().0;
        assert!((s - w).norm() < 1e-11, "{s} {w}");
        assert!((s - m).norm() < 1e-11, "{s} {m}");
    }
}
