//! Fox H-functions through their Mellin–Barnes integrals.
//!
//! Convention: with Θ(ζ) = Π_{j≤m} Γ(b_j + B_j ζ) Π_{i≤n} Γ(1 - a_i - A_i ζ)
//! divided by Π_{i>n} Γ(a_i + A_i ζ) Π_{j>m} Γ(1 - b_j - B_j ζ),
//!
//! H^{m,n}_{p,q}(z) = (1/2πi) ∫ Θ(ζ) z^{-ζ} dζ
//!
//! along a vertical line Re ζ = c that leaves the poles of the first product
//! to the left and those of the second to the right.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::gamma::ln_gamma_complex;
use crate::error::{Error, Result};
use crate::solver::HilferProblem;

/// Parameters of an H^{m,n}_{p,q} function: `upper` holds (a_i, A_i),
/// `lower` holds (b_j, B_j).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FoxHSpec {
    pub upper: Vec<(f64, f64)>,
    pub lower: Vec<(f64, f64)>,
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub q: usize,
}

impl FoxHSpec {
    pub fn new(m: usize, n: usize, upper: Vec<(f64, f64)>, lower: Vec<(f64, f64)>) -> Result<Self> {
        let (p, q) = (upper.len(), lower.len());
        if m > q || n > p {
            return Err(Error::invalid(format!(
                "indices m={m}, n={n} exceed q={q}, p={p}"
            )));
        }
        if upper.iter().chain(lower.iter()).any(|&(v, w)| !(w > 0.0) || !v.is_finite()) {
            return Err(Error::invalid("Fox H scale parameters must be positive"));
        }
        Ok(FoxHSpec {
            upper,
            lower,
            m,
            n,
            p,
            q,
        })
    }

    /// The H^{1,2}_{3,2} kernel Γ(ζ)Γ(1-ζ)Γ(n/2 - sζ) / (Γ(sζ)Γ(μ - αζ)) of the
    /// fundamental solution in dimension `dim`.
    pub fn diffusion_wave(dim: usize, s: f64, alpha: f64, mu: f64) -> Result<Self> {
        FoxHSpec::new(
            1,
            2,
            vec![(0.0, 1.0), (1.0 - 0.5 * dim as f64, s), (0.0, s)],
            vec![(0.0, 1.0), (1.0 - mu, alpha)],
        )
    }

    /// ln Θ(ζ); only its exponential is meaningful.
    pub fn ln_kernel(&self, zeta: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &(b, bb)) in self.lower.iter().enumerate() {
            if j < self.m {
                acc += ln_gamma_complex(b + bb * zeta);
            } else {
                acc -= ln_gamma_complex(1.0 - b - bb * zeta);
            }
        }
        for (i, &(a, aa)) in self.upper.iter().enumerate() {
            if i < self.n {
                acc += ln_gamma_complex(1.0 - a - aa * zeta);
            } else {
                acc -= ln_gamma_complex(a + aa * zeta);
            }
        }
        acc
    }

    /// a* = Σ_{i≤n} A_i - Σ_{i>n} A_i + Σ_{j≤m} B_j - Σ_{j>m} B_j.
    pub fn a_star(&self) -> f64 {
        let up: f64 = self
            .upper
            .iter()
            .enumerate()
            .map(|(i, &(_, a))| if i < self.n { a } else { -a })
            .sum();
        let lo: f64 = self
            .lower
            .iter()
            .enumerate()
            .map(|(j, &(_, b))| if j < self.m { b } else { -b })
            .sum();
        up + lo
    }

    /// Δ = Σ B_j - Σ A_i.
    pub fn delta(&self) -> f64 {
        self.lower.iter().map(|l| l.1).sum::<f64>() - self.upper.iter().map(|u| u.1).sum::<f64>()
    }

    /// Net pole order at ζ: numerator Gamma poles minus denominator ones.
    pub(crate) fn pole_order(&self, zeta: f64) -> i32 {
        let hits = |arg: f64| arg <= POLE_EPS && (arg - arg.round()).abs() <= POLE_EPS;
        let mut order = 0;
        for (j, &(b, bb)) in self.lower.iter().enumerate() {
            if j < self.m {
                order += hits(b + bb * zeta) as i32;
            } else {
                order -= hits(1.0 - b - bb * zeta) as i32;
            }
        }
        for (i, &(a, aa)) in self.upper.iter().enumerate() {
            if i < self.n {
                order += hits(1.0 - a - aa * zeta) as i32;
            } else {
                order -= hits(a + aa * zeta) as i32;
            }
        }
        order
    }

    /// Rightmost pole of the left family that survives cancellation against
    /// the denominator, or -inf when the first few poles all cancel.
    fn left_pole_start(&self) -> f64 {
        let mut candidates: Vec<f64> = self.lower[..self.m]
            .iter()
            .flat_map(|&(b, bb)| (0..SCANNED_POLES).map(move |k| -(b + k as f64) / bb))
            .collect();
        candidates.sort_by(|a, b| b.total_cmp(a));
        candidates
            .into_iter()
            .find(|&z| self.pole_order(z) > 0)
            .unwrap_or(f64::NEG_INFINITY)
    }

    fn right_pole_start(&self) -> f64 {
        let mut candidates: Vec<f64> = self.upper[..self.n]
            .iter()
            .flat_map(|&(a, aa)| (0..SCANNED_POLES).map(move |k| (1.0 - a + k as f64) / aa))
            .collect();
        candidates.sort_by(|a, b| a.total_cmp(b));
        candidates
            .into_iter()
            .find(|&z| self.pole_order(z) > 0)
            .unwrap_or(f64::INFINITY)
    }

    /// Open interval of abscissas separating the two pole families, if any.
    /// Poles cancelled by denominator factors do not bound it, so either end
    /// may be infinite.
    pub fn separating_interval(&self) -> Option<(f64, f64)> {
        let lo = self.left_pole_start();
        let hi = self.right_pole_start();
        (lo < hi).then_some((lo, hi))
    }

    /// Largest log-modulus of Θ(ζ) z^{-ζ} sampled up the line Re ζ = c.
    fn line_peak(&self, c: f64, ln_arg: f64) -> f64 {
        LINE_SAMPLES
            .iter()
            .map(|&tau| {
                let zeta = Complex64::new(c, tau);
                (self.ln_kernel(zeta) - zeta * ln_arg).re
            })
            .fold(f64::NEG_INFINITY, |a, b| if b.is_nan() { f64::INFINITY } else { a.max(b) })
    }

    /// Abscissa that minimizes the peak modulus of the integrand, which
    /// keeps cancellation small when H(z) is far below the integrand scale.
    pub fn saddle_abscissa(&self, arg: f64) -> Option<f64> {
        let (lo, hi) = self.separating_interval()?;
        let ln_arg = arg.ln();
        let peak = |c: f64| self.line_peak(c, ln_arg);
        let mut reach = SADDLE_REACH;
        loop {
            let (a, b) = match (lo.is_finite(), hi.is_finite()) {
                (true, true) => {
                    let m = POLE_MARGIN * (hi - lo).min(1.0);
                    (lo + m, hi - m)
                }
                (true, false) => (lo + POLE_MARGIN, lo + reach),
                (false, true) => (hi - reach, hi - POLE_MARGIN),
                (false, false) => (-reach, reach),
            };
            let step = (b - a) / SADDLE_SCAN as f64;
            let best = (0..=SADDLE_SCAN)
                .map(|k| (k, peak(a + k as f64 * step)))
                .min_by(|x, y| x.1.total_cmp(&y.1))?
                .0;
            // An unbounded side whose minimum sits on the scan edge is widened.
            let open_edge = (best == 0 && !lo.is_finite()) || (best == SADDLE_SCAN && !hi.is_finite());
            if open_edge && reach < MAX_REACH {
                reach *= 4.0;
                continue;
            }
            let (l, r) = (
                a + best.saturating_sub(1) as f64 * step,
                a + (best + 1).min(SADDLE_SCAN) as f64 * step,
            );
            return Some(self.off_pole(golden_min(peak, l, r)));
        }
    }

    /// Nudges c off real points where some Gamma factor is singular, since a
    /// cancelled pole still breaks the node at τ = 0.
    fn off_pole(&self, c: f64) -> f64 {
        let args = |x: f64| -> Vec<f64> {
            let lower = self.lower.iter().enumerate().map(|(j, &(b, bb))| {
                if j < self.m {
                    b + bb * x
                } else {
                    1.0 - b - bb * x
                }
            });
            let upper = self.upper.iter().enumerate().map(|(i, &(a, aa))| {
                if i < self.n {
                    1.0 - a - aa * x
                } else {
                    a + aa * x
                }
            });
            lower.chain(upper).collect()
        };
        let near = |x: f64| args(x).iter().any(|&v| v < 0.5 && (v - v.round()).abs() < 1e-3);
        [0.0, 0.01, -0.01, 0.02, -0.02, 0.03, -0.03]
            .into_iter()
            .map(|d| c + d)
            .find(|&x| !near(x))
            .unwrap_or(c)
    }
}

fn golden_min(f: impl Fn(f64) -> f64, mut l: f64, mut r: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (r - g * (r - l), l + g * (r - l));
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..30 {
        if f1 <= f2 {
            r = x2;
            (x2, f2) = (x1, f1);
            x1 = r - g * (r - l);
            f1 = f(x1);
        } else {
            l = x1;
            (x1, f1) = (x2, f2);
            x2 = l + g * (r - l);
            f2 = f(x2);
        }
    }
    0.5 * (l + r)
}

const POLE_EPS: f64 = 1e-12;
const SCANNED_POLES: usize = 64;
const POLE_MARGIN: f64 = 0.1;
const SADDLE_REACH: f64 = 40.0;
const MAX_REACH: f64 = 2560.0;
const SADDLE_SCAN: usize = 80;
const LINE_SAMPLES: [f64; 9] = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 50.0];

/// How a contour picks its abscissa.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    /// Use `abscissa` as given.
    Fixed,
    /// Move to the saddle of the integrand for each argument, falling back
    /// to `abscissa`.
    Saddle,
}

/// Vertical integration line Re ζ = `abscissa`, truncated at |Im ζ| ≤
/// `half_height` and sampled with `nodes` trapezoid points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContourSpec {
    pub abscissa: f64,
    pub half_height: f64,
    pub nodes: usize,
    pub placement: Placement,
}

pub const DEFAULT_HALF_HEIGHT: f64 = 50.0;
pub const DEFAULT_NODES: usize = 4096;

impl ContourSpec {
    pub fn new(abscissa: f64, half_height: f64, nodes: usize) -> Result<Self> {
        if !(half_height > 0.0) || !abscissa.is_finite() {
            return Err(Error::InvalidContour(format!(
                "need finite abscissa and positive half height, got c={abscissa}, T={half_height}"
            )));
        }
        if nodes < 64 {
            return Err(Error::InvalidContour(format!("need at least 64 nodes, got {nodes}")));
        }
        Ok(ContourSpec {
            abscissa,
            half_height,
            nodes,
            placement: Placement::Fixed,
        })
    }

    /// Fixed line through the middle of the separating interval (half a unit
    /// inside a finite end when the other is unbounded), default truncation.
    pub fn midpoint(h: &FoxHSpec) -> Result<Self> {
        let (lo, hi) = h.separating_interval().ok_or_else(|| {
            Error::InvalidContour("no separating contour between the pole families".into())
        })?;
        let c = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => 0.5 * (lo + hi),
            (true, false) => lo + 0.5,
            (false, true) => hi - 0.5,
            (false, false) => 0.0,
        };
        ContourSpec::new(h.off_pole(c), DEFAULT_HALF_HEIGHT, DEFAULT_NODES)
    }

    /// As [`ContourSpec::midpoint`] but re-placed at the saddle for each
    /// argument.
    pub fn adaptive(h: &FoxHSpec) -> Result<Self> {
        Ok(ContourSpec {
            placement: Placement::Saddle,
            ..ContourSpec::midpoint(h)?
        })
    }

    /// Abscissa actually used for `h` at `arg`.
    pub fn resolve(&self, h: &FoxHSpec, arg: f64) -> f64 {
        match self.placement {
            Placement::Fixed => self.abscissa,
            Placement::Saddle => h.saddle_abscissa(arg).unwrap_or(self.abscissa),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidityReport {
    pub valid: bool,
    pub a_star: f64,
    pub delta: f64,
    pub left_poles: Vec<f64>,
    pub right_poles: Vec<f64>,
    pub separating_interval: Option<(f64, f64)>,
    pub issues: Vec<String>,
}

const LISTED_POLES: usize = 4;

/// Structural check of a spec before contour integration at a positive
/// argument: absolute convergence on vertical lines needs a* > 0, and the
/// pole families must be separable.
pub fn check_convergence(h: &FoxHSpec, arg: f64) -> ValidityReport {
    let mut issues = Vec::new();
    let a_star = h.a_star();
    let delta = h.delta();
    let mut left_poles: Vec<f64> = h.lower[..h.m]
        .iter()
        .flat_map(|&(b, bb)| (0..LISTED_POLES).map(move |k| -(b + k as f64) / bb))
        .filter(|&z| h.pole_order(z) > 0)
        .collect();
    let mut right_poles: Vec<f64> = h.upper[..h.n]
        .iter()
        .flat_map(|&(a, aa)| (0..LISTED_POLES).map(move |k| (1.0 - a + k as f64) / aa))
        .filter(|&z| h.pole_order(z) > 0)
        .collect();
    left_poles.sort_by(|a, b| b.partial_cmp(a).unwrap());
    right_poles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let interval = h.separating_interval();
    if interval.is_none() {
        issues.push("no separating contour".to_string());
    }
    if !(a_star > 0.0) {
        issues.push(format!("a* = {a_star} is not positive; vertical-line integral diverges"));
    }
    if !(arg > 0.0 && arg.is_finite()) {
        issues.push(format!("argument {arg} is not a positive real"));
    }
    ValidityReport {
        valid: issues.is_empty(),
        a_star,
        delta,
        left_poles,
        right_poles,
        separating_interval: interval,
        issues,
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ContourIntegral {
    pub value: Complex64,
    pub error_estimate: f64,
    pub half_height: f64,
    pub step: f64,
    pub levels: usize,
}

const MB_TOLERANCE: f64 = 1e-10;
const ROUNDING_FLOOR: f64 = 32.0;
const MB_MAX_LEVELS: usize = 4;

/// Trapezoid quadrature of the Mellin–Barnes integral of `h` at `arg`.
///
/// Each refinement level doubles the half height and halves the step; the
/// loop stops when two levels agree to 1e-10 relative.
pub fn mellin_barnes(h: &FoxHSpec, arg: f64, contour: &ContourSpec) -> Result<ContourIntegral> {
    let report = check_convergence(h, arg);
    if !report.valid {
        return Err(Error::InvalidContour(report.issues.join("; ")));
    }
    let (lo, hi) = report.separating_interval.unwrap_or((0.0, 0.0));
    let c = contour.resolve(h, arg);
    if !(c > lo && c < hi) {
        return Err(Error::InvalidContour(format!(
            "abscissa {c} outside the separating interval ({lo}, {hi})"
        )));
    }
    let ln_arg = arg.ln();
    let integrand = |tau: f64| -> Complex64 {
        let zeta = Complex64::new(c, tau);
        (h.ln_kernel(zeta) - zeta * ln_arg).exp()
    };
    vertical_trapezoid(integrand, contour.half_height, contour.nodes, MB_TOLERANCE, MB_MAX_LEVELS)
        .map_err(|detail| Error::no_convergence("mellin_barnes", detail))
}

/// (1/2π) ∫_{-T}^{T} f(τ) dτ by the trapezoid rule with nested refinement.
/// Shared with the φ-Mellin inversion.
///
/// `tol` is relative. A level also counts as settled once the change drops
/// under the rounding floor of the sum, which is what limits accuracy when
/// the result is far below the integrand scale; the reported error is never
/// below that floor.
pub(crate) fn vertical_trapezoid<F: Fn(f64) -> Complex64>(
    f: F,
    half_height: f64,
    nodes: usize,
    tol: f64,
    max_levels: usize,
) -> std::result::Result<ContourIntegral, String> {
    let mut half_count = (nodes / 2).max(32) as i64;
    let mut h = half_height / half_count as f64;
    // Unscaled sum over τ_j = j h, |j| ≤ half_count.
    let mut sum = f(0.0);
    let mut abs_sum = sum.norm();
    for j in 1..=half_count {
        let t = j as f64 * h;
        let (a, b) = (f(t), f(-t));
        sum += a + b;
        abs_sum += a.norm() + b.norm();
    }
    let mut value = sum * (h / (2.0 * PI));
    let mut t_cur = half_height;
    for level in 1..=max_levels {
        let h_new = 0.5 * h;
        let new_count = 4 * half_count;
        let mut new_sum = sum;
        for j in 1..=new_count {
            // Odd indices are new everywhere; even ones only beyond the old range.
            if j % 2 == 0 && j <= 2 * half_count {
                continue;
            }
            let t = j as f64 * h_new;
            let (a, b) = (f(t), f(-t));
            new_sum += a + b;
            abs_sum += a.norm() + b.norm();
        }
        let new_value = new_sum * (h_new / (2.0 * PI));
        let floor = ROUNDING_FLOOR * f64::EPSILON * abs_sum * (h_new / (2.0 * PI));
        let diff = (new_value - value).norm();
        if !(new_value.re.is_finite() && new_value.im.is_finite()) {
            return Err(format!("non-finite integrand on the line at level {level}"));
        }
        sum = new_sum;
        half_count = new_count;
        h = h_new;
        t_cur *= 2.0;
        value = new_value;
        if diff <= tol * value.norm() || diff <= floor {
            return Ok(ContourIntegral {
                value,
                error_estimate: diff.max(floor),
                half_height: t_cur,
                step: h,
                levels: level,
            });
        }
    }
    Err(format!(
        "levels did not settle to relative {tol:e} (last half height {t_cur})"
    ))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FoxValue {
    pub value: f64,
    pub imaginary_residue: f64,
    pub error_estimate: f64,
    /// Kernel argument W = (2/Z)^{2s} actually integrated.
    pub kernel_argument: f64,
}

/// H^{1,2}_{3,2} factor of the fundamental solution at the scaling variable
/// Z = |φ(x)| / (λ γ(t)^α)^{1/2s}.
///
/// Internally the kernel is integrated against W = 2^{2s} λ γ^α / |φ|^{2s},
/// which equals (2/Z)^{2s}.
pub fn fox_h_1232(problem: &HilferProblem, z: f64) -> Result<FoxValue> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::invalid(format!("Z must be a positive real, got {z}")));
    }
    let s = problem.s.value();
    let spec = FoxHSpec::diffusion_wave(problem.dim, s, problem.order.alpha(), problem.order.mu())?;
    let w = (2.0 / z).powf(2.0 * s);
    let contour = ContourSpec::adaptive(&spec)?;
    let integral = mellin_barnes(&spec, w, &contour)?;
    let residue = integral.value.im.abs();
    if residue > 1e-8 * integral.value.re.abs().max(1.0) {
        return Err(Error::ImaginaryResidue {
            context: "fox_h_1232",
            residue,
        });
    }
    Ok(FoxValue {
        value: integral.value.re,
        imaginary_residue: residue,
        error_estimate: integral.error_estimate,
        kernel_argument: w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_kernel() {
        // Θ = Γ(ζ)Γ(1-ζ)/Γ(1-ζ): H^{1,1}_{1,2} form of E_{1,1}(-z) = e^{-z}.
        let spec = FoxHSpec::new(1, 1, vec![(0.0, 1.0)], vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let c = ContourSpec::midpoint(&spec).unwrap();
        let r = mellin_barnes(&spec, 1.0, &c).unwrap();
        assert!((r.value.re - (-1f64).exp()).abs() < 1e-8);
        assert!(r.value.im.abs() < 1e-12);
    }

    #[test]
    fn overlapping_poles_rejected() {
        let spec = FoxHSpec::new(1, 1, vec![(1.0, 1.0)], vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let rep = check_convergence(&spec, 1.0);
        assert!(!rep.valid);
        assert!(rep.issues.iter().any(|m| m.contains("no separating contour")));
        assert!(ContourSpec::midpoint(&spec).is_err());
    }

    #[test]
    fn heat_kernel_structure() {
        let spec = FoxHSpec::diffusion_wave(1, 1.0, 1.0, 1.0).unwrap();
        let rep = check_convergence(&spec, 1.0);
        assert!(rep.valid);
        assert!((rep.a_star - 1.0).abs() < 1e-15);
        // Γ(ζ)/Γ(sζ) and Γ(1-ζ)/Γ(μ-αζ) cancel, leaving only Γ(1/2 - ζ).
        assert_eq!(rep.separating_interval, Some((f64::NEG_INFINITY, 0.5)));
        // H(W) = W^{-1/2} e^{-1/W}.
        let w = 4.0;
        let c = ContourSpec::midpoint(&spec).unwrap();
        let r = mellin_barnes(&spec, w, &c).unwrap();
        assert!((r.value.re - w.powf(-0.5) * (-1.0 / w).exp()).abs() < 1e-10);
    }

    #[test]
    fn saddle_line_keeps_relative_accuracy_in_the_tail() {
        let spec = FoxHSpec::diffusion_wave(1, 1.0, 1.0, 1.0).unwrap();
        let c = ContourSpec::adaptive(&spec).unwrap();
        for w in [0.5f64, 0.05, 0.01] {
            let exact = w.powf(-0.5) * (-1.0 / w).exp();
            let r = mellin_barnes(&spec, w, &c).unwrap();
            assert!(((r.value.re - exact) / exact).abs() < 1e-9, "w={w}: {} vs {exact}", r.value.re);
        }
    }

    #[test]
    fn cancelled_poles_do_not_bound_the_strip() {
        // Γ(ζ)/Γ(ζ/2): ζ = 0 cancels, ζ = -1 survives.
        let spec = FoxHSpec::diffusion_wave(1, 0.5, 1.0, 1.0).unwrap();
        assert_eq!(spec.separating_interval(), Some((-1.0, 1.0)));
    }
}
