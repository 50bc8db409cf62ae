//! The φ-Mellin pair on (0, ∞):
//!
//! M[f](s) = ∫_0^∞ φ(x)^{s-1} ω(x) f(x) φ'(x) dx,
//! f(x) = (1/(2πi ω(x))) ∫_{c-i∞}^{c+i∞} M[f](s) φ(x)^{-s} ds.
//!
//! The inversion abscissa is called `abscissa` to keep it apart from the
//! temporal γ(t).

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Diffeomorphism, SpatialWeight};
use crate::quad::{integrate, Tolerance};
use crate::specfun::foxh::{vertical_trapezoid, ContourIntegral};

const PANEL_TOL: Tolerance = Tolerance::new(1e-14, 1e-13).with_max_intervals(400);
const MAX_PANELS: usize = 10;
// ln v beyond this overflows φ for the catalog maps.
const LOG_LIMIT: f64 = 700.0;

/// Convergence strip (sigma_min, sigma_max) and the chosen abscissa.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MellinStrip {
    sigma_min: f64,
    sigma_max: f64,
    abscissa: f64,
}

impl MellinStrip {
    pub fn new(sigma_min: f64, sigma_max: f64, abscissa: f64) -> Result<Self> {
        if !(sigma_min < abscissa && abscissa < sigma_max) {
            return Err(Error::InvalidContour(format!(
                "abscissa {abscissa} must lie strictly inside ({sigma_min}, {sigma_max})"
            )));
        }
        Ok(MellinStrip {
            sigma_min,
            sigma_max,
            abscissa,
        })
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma_min
    }
    pub fn sigma_max(&self) -> f64 {
        self.sigma_max
    }
    pub fn abscissa(&self) -> f64 {
        self.abscissa
    }
}

/// Truncation and refinement of the vertical-line trapezoid rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InversionControl {
    pub half_height: f64,
    pub nodes: usize,
    pub tol: f64,
    pub max_levels: usize,
}

impl Default for InversionControl {
    fn default() -> Self {
        InversionControl {
            half_height: 40.0,
            nodes: 4096,
            tol: 1e-7,
            max_levels: 4,
        }
    }
}

fn check_half_line(d: &Diffeomorphism) -> Result<()> {
    if d.dim() != 1 {
        return Err(Error::invalid("the Mellin pair needs a one-dimensional map"));
    }
    let probe = [1e-3, 1.0, 10.0];
    if probe.iter().any(|&x| !(d.map(&[x])[0] > 0.0)) {
        return Err(Error::invalid("phi must map (0, inf) into (0, inf)"));
    }
    Ok(())
}

/// Forward transform at s, after v = φ(x) and y = ln v.
///
/// Panels in y double in width away from 0 in both directions; a side stops
/// once two consecutive panels add less than 1e-13 of the running total, and
/// a side that never settles is reported as divergent.
pub fn mellin_forward(
    f: &dyn Fn(f64) -> f64,
    d: &Diffeomorphism,
    w: &SpatialWeight,
    s: Complex64,
) -> Result<Complex64> {
    check_half_line(d)?;
    let axis = d
        .axis(0)
        .ok_or_else(|| Error::invalid("the Mellin pair needs a separable map"))?;
    let mut failure = None;
    let mut integrand = |y: f64| -> Complex64 {
        let v = y.exp();
        let x = match axis.inverse(v) {
            Ok(x) => x,
            Err(e) => {
                failure.get_or_insert(e);
                return Complex64::new(0.0, 0.0);
            }
        };
        let value = w.value(&[x]) * f(x);
        // v^{s-1} dv = v^s dy
        (s * y).exp() * value
    };
    let mut total = Complex64::new(0.0, 0.0);
    for direction in [1.0, -1.0] {
        let mut quiet = 0;
        let mut start = 0.0f64;
        let mut width = 1.0f64;
        let mut settled = false;
        for _ in 0..MAX_PANELS {
            let end = (start + width).min(LOG_LIMIT);
            let (a, b) = if direction > 0.0 { (start, end) } else { (-end, -start) };
            let panel = integrate(&mut integrand, a, b, PANEL_TOL);
            if !(panel.value.re.is_finite() && panel.value.im.is_finite()) {
                return Err(Error::Divergence(format!("non-finite panel on [{a}, {b}] in ln phi")));
            }
            total += panel.value;
            let small = panel.value.norm() <= 1e-13 * total.norm().max(1e-300) + 1e-300;
            quiet = if small { quiet + 1 } else { 0 };
            if quiet >= 2 {
                settled = true;
                break;
            }
            if end >= LOG_LIMIT {
                break;
            }
            start = end;
            width *= 2.0;
        }
        if !settled {
            return Err(Error::Divergence(format!(
                "panel sums do not settle toward {} at Re s = {}",
                if direction > 0.0 { "infinity" } else { "zero" },
                s.re
            )));
        }
    }
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(total)
}

/// Inverse transform at x > 0 on the line Re s = `strip.abscissa()`.
pub fn mellin_inverse(
    transform: &dyn Fn(Complex64) -> Complex64,
    strip: &MellinStrip,
    d: &Diffeomorphism,
    w: &SpatialWeight,
    x: f64,
    control: &InversionControl,
) -> Result<Complex64> {
    mellin_inverse_detailed(transform, strip, d, w, x, control).map(|r| r.value)
}

/// As [`mellin_inverse`], also returning the refinement record.
pub fn mellin_inverse_detailed(
    transform: &dyn Fn(Complex64) -> Complex64,
    strip: &MellinStrip,
    d: &Diffeomorphism,
    w: &SpatialWeight,
    x: f64,
    control: &InversionControl,
) -> Result<ContourIntegral> {
    if !(x > 0.0) {
        return Err(Error::invalid(format!("x must be positive, got {x}")));
    }
    check_half_line(d)?;
    let om = w.value(&[x]);
    if om.norm() < crate::wfourier::VANISHING_WEIGHT {
        return Err(Error::VanishingWeight {
            index: 0,
            modulus: om.norm(),
        });
    }
    let ln_phi = d.map(&[x])[0].ln();
    let c = strip.abscissa();
    let mut r = vertical_trapezoid(
        |tau| {
            let s = Complex64::new(c, tau);
            transform(s) * (-s * ln_phi).exp()
        },
        control.half_height,
        control.nodes,
        control.tol,
        control.max_levels,
    )
    .map_err(|detail| Error::Divergence(format!("vertical-line integrand does not decay: {detail}")))?;
    r.value /= om;
    r.error_estimate /= om.norm();
    Ok(r)
}
