//! Fundamental solution of the weighted Hilfer diffusion-wave problem
//!
//! D^{α,β}_{γ,ρ} u = -λ (-Δ_{φ,ω})^s u,
//!
//! by three routes: the inverse weighted Fourier transform of the symbol
//! Ĝ(|ξ|, t) (the reference), the Mellin contour integral, and the packaged
//! Fox-H form. The Cauchy problem is solved by the weighted convolution
//! G ∗_{φ,ω} f₀ in the spectral domain.
//!
//! Normalization: G = (2π)^{-n/2} F⁻¹_{φ,ω}[Ĝ], so that in the trivial
//! geometry G = (2π)^{-n} ∫ Ĝ(|ξ|) e^{iξ·x} dξ, and
//!
//! G(x, t) = π^{-n/2} (ρ(0⁺)/ρ(t)) γ(t)^{μ-1} / (ω(x) |φ(x)|ⁿ) · H(W),
//! W = 2^{2s} λ γ(t)^α / |φ(x)|^{2s} = (2/Z)^{2s},
//!
//! with H the Mellin–Barnes integral of Γ(ζ)Γ(1-ζ)Γ(n/2-sζ)/(Γ(sζ)Γ(μ-αζ)) W^{-ζ}.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use log::warn;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fracops::{FractionalOrder, HilferOrder};
use crate::geometry::{DeformedGrid, Diffeomorphism, SpatialWeight, TemporalPair};
use crate::mellin::{mellin_inverse_detailed, InversionControl, MellinStrip};
use crate::quad::{integrate, integrate_to_infinity, wynn_epsilon, ErrorTrap, Tolerance};
use crate::specfun::{bessel_j0, check_convergence, fox_h_1232, ln_gamma_complex, mittag_leffler_real, ContourSpec, FoxHSpec};
use crate::wfourier::{forward, inverse, GridFunction, SpectralField};

/// Nyquist-shell symbol magnitude, relative to the peak, above which the
/// grid is reported as under-resolved.
pub const RESOLUTION_WARNING: f64 = 1e-6;
const IMAGINARY_RESIDUE: f64 = 1e-8;
const MAX_SEGMENTS: usize = 400;
const SEGMENT_TOL: f64 = 1e-12;
const ROUNDING: f64 = 32.0 * f64::EPSILON;

/// Parameters of the generalized Hilfer diffusion-wave problem.
#[derive(Clone, Debug)]
pub struct HilferProblem {
    pub order: HilferOrder,
    pub s: FractionalOrder,
    pub lambda: f64,
    pub dim: usize,
    pub geometry: Diffeomorphism,
    pub weight: SpatialWeight,
    pub temporal: TemporalPair,
}

impl HilferProblem {
    pub fn new(
        order: HilferOrder,
        s: FractionalOrder,
        lambda: f64,
        geometry: Diffeomorphism,
        weight: SpatialWeight,
        temporal: TemporalPair,
    ) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::invalid(format!("lambda must be positive, got {lambda}")));
        }
        Ok(HilferProblem {
            order,
            s,
            lambda,
            dim: geometry.dim(),
            geometry,
            weight,
            temporal,
        })
    }

    /// Trivial geometry, unit weight, γ(t) = t, ρ ≡ 1, λ = 1.
    pub fn trivial(dim: usize, alpha: f64, beta: f64, s: f64) -> Result<Self> {
        HilferProblem::new(
            HilferOrder::new(alpha, beta)?,
            FractionalOrder::new(s)?,
            1.0,
            Diffeomorphism::identity(dim),
            SpatialWeight::one(),
            TemporalPair::classical(),
        )
    }

    /// (ρ(0⁺)/ρ(t)) γ(t)^{μ-1}, the time factor shared by every route.
    pub fn time_factor(&self, t: f64) -> f64 {
        let tp = &self.temporal;
        tp.rho_at_zero() / tp.rho(t) * tp.gamma(t).powf(self.order.mu() - 1.0)
    }

    /// λ γ(t)^α
    pub fn diffusion_scale(&self, t: f64) -> f64 {
        self.lambda * self.temporal.gamma(t).powf(self.order.alpha())
    }

    /// The H^{1,2}_{3,2} kernel of the Mellin and Fox-H routes.
    pub fn kernel(&self) -> Result<FoxHSpec> {
        FoxHSpec::diffusion_wave(self.dim, self.s.value(), self.order.alpha(), self.order.mu())
    }

    /// Saddle-placed contour with the default truncation.
    pub fn default_contour(&self) -> Result<ContourSpec> {
        ContourSpec::adaptive(&self.kernel()?)
    }

    /// Scaling variable Z = |φ(x)| / (λγ(t)^α)^{1/2s}.
    pub fn similarity_variable(&self, x: &[f64], t: f64) -> f64 {
        radius(&self.geometry.map(x)) / self.diffusion_scale(t).powf(0.5 / self.s.value())
    }
}

fn radius(u: &[f64]) -> f64 {
    u.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("t must be positive, got {t}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GreenRoute {
    Spectral,
    Mellin,
    FoxH,
}

impl GreenRoute {
    pub fn name(self) -> &'static str {
        match self {
            GreenRoute::Spectral => "spectral",
            GreenRoute::Mellin => "mellin",
            GreenRoute::FoxH => "foxh",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "spectral" => Ok(GreenRoute::Spectral),
            "mellin" => Ok(GreenRoute::Mellin),
            "foxh" => Ok(GreenRoute::FoxH),
            other => Err(Error::UnknownCatalog {
                kind: "route",
                name: other.to_string(),
            }),
        }
    }
}

/// G at one point, with the route that produced it.
#[derive(Clone, Debug, Serialize)]
pub struct GreenEvaluation {
    pub x: Vec<f64>,
    pub t: f64,
    pub value: f64,
    pub route: GreenRoute,
    pub error_estimate: f64,
}

/// Ĝ(ξ, t) = (ρ(0⁺)/ρ(t)) γ(t)^{μ-1} E_{α,μ}(-λ|ξ|^{2s} γ(t)^α).
pub fn green_hat(xi_norm: f64, t: f64, p: &HilferProblem) -> Result<Complex64> {
    Ok(Complex64::new(symbol(xi_norm, t, p)?, 0.0))
}

fn symbol(xi_norm: f64, t: f64, p: &HilferProblem) -> Result<f64> {
    check_time(t)?;
    if !(xi_norm >= 0.0) {
        return Err(Error::invalid(format!("|xi| must be non-negative, got {xi_norm}")));
    }
    let z = -p.diffusion_scale(t) * xi_norm.powf(2.0 * p.s.value());
    // E_{α,μ}(-x) → 0 as x → ∞ for α < 2; quadrature maps can overflow z.
    if z == f64::NEG_INFINITY && p.order.alpha() < 2.0 {
        return Ok(0.0);
    }
    Ok(p.time_factor(t) * mittag_leffler_real(p.order.alpha(), p.order.mu(), z)?)
}

/// Symbol values keyed by (t, |ξ|) bit patterns. A cache belongs to one
/// problem; sharing it between problems returns stale values.
#[derive(Debug, Default)]
pub struct SymbolCache {
    entries: Mutex<HashMap<(u64, u64), f64>>,
}

impl SymbolCache {
    pub fn new() -> Self {
        SymbolCache::default()
    }

    pub fn len(&self) -> usize {
        self.entries.lock().map(|m| m.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clear(&self) {
        if let Ok(mut m) = self.entries.lock() {
            m.clear();
        }
    }
}

// Symbol at every node of the frequency grid, evaluated once per distinct |ξ|.
fn symbol_field(
    grid: &Arc<DeformedGrid>,
    t: f64,
    p: &HilferProblem,
    cache: Option<&SymbolCache>,
    scale: f64,
) -> Result<SpectralField> {
    let mut field = SpectralField::from_fn(grid, |_| Complex64::new(0.0, 0.0));
    let norms: Vec<u64> = (0..grid.len()).map(|k| radius(&field.xi(k)).to_bits()).collect();
    let mut unique = norms.clone();
    unique.sort_unstable();
    unique.dedup();
    let t_bits = t.to_bits();
    let mut known: HashMap<u64, f64> = HashMap::with_capacity(unique.len());
    let mut missing = Vec::new();
    match cache.map(|c| c.entries.lock()) {
        Some(Ok(entries)) => {
            for &b in &unique {
                match entries.get(&(t_bits, b)) {
                    Some(&v) => {
                        known.insert(b, v);
                    }
                    None => missing.push(b),
                }
            }
        }
        _ => missing = unique,
    }
    let computed: Vec<f64> = missing
        .par_iter()
        .map(|&b| symbol(f64::from_bits(b), t, p))
        .collect::<Result<_>>()?;
    if let Some(Ok(mut entries)) = cache.map(|c| c.entries.lock()) {
        for (&b, &v) in missing.iter().zip(&computed) {
            entries.insert((t_bits, b), v);
        }
    }
    known.extend(missing.into_iter().zip(computed));
    for (v, b) in field.values_mut().iter_mut().zip(&norms) {
        *v = Complex64::new(scale * known[b], 0.0);
    }
    Ok(field)
}

fn check_resolution(field: &SpectralField, context: &str) -> f64 {
    let ratio = field.decay_ratio();
    if ratio > RESOLUTION_WARNING {
        warn!(
            "{context}: symbol on the Nyquist shell is {ratio:.3e} of its peak; the grid under-resolves G"
        );
    }
    ratio
}

fn real_part_checked(g: GridFunction, context: &'static str) -> Result<GridFunction> {
    let peak = g.values().iter().fold(0.0f64, |m, v| m.max(v.re.abs()));
    let residue = g.values().iter().fold(0.0f64, |m, v| m.max(v.im.abs()));
    if residue > IMAGINARY_RESIDUE * peak.max(f64::MIN_POSITIVE) {
        return Err(Error::ImaginaryResidue { context, residue });
    }
    let grid = Arc::clone(g.grid());
    let values = g.into_values().into_iter().map(|v| Complex64::new(v.re, 0.0)).collect();
    GridFunction::new(&grid, values)
}

fn check_grid(grid: &DeformedGrid, p: &HilferProblem) -> Result<()> {
    if grid.dim() != p.dim {
        return Err(Error::GridMismatch(format!(
            "grid of dimension {} for a problem of dimension {}",
            grid.dim(),
            p.dim
        )));
    }
    if grid.geometry().name() != p.geometry.name() {
        return Err(Error::GridMismatch(format!(
            "grid built on geometry '{}' but the problem uses '{}'",
            grid.geometry().name(),
            p.geometry.name()
        )));
    }
    Ok(())
}

/// G(·, t) on a grid, as (2π)^{-n/2} F⁻¹_{φ,ω}[Ĝ(|ξ|, t)].
///
/// The unpaired Nyquist modes are dropped so that the result is real to
/// round-off; the imaginary residue is checked against 1e-8 max|G|.
pub fn green_spectral_route(grid: &Arc<DeformedGrid>, t: f64, p: &HilferProblem) -> Result<GridFunction> {
    green_spectral_route_cached(grid, t, p, None)
}

pub fn green_spectral_route_cached(
    grid: &Arc<DeformedGrid>,
    t: f64,
    p: &HilferProblem,
    cache: Option<&SymbolCache>,
) -> Result<GridFunction> {
    check_time(t)?;
    check_grid(grid, p)?;
    let scale = (2.0 * PI).powf(-0.5 * p.dim as f64);
    let mut field = symbol_field(grid, t, p, cache, scale)?;
    check_resolution(&field, "green_spectral_route");
    field.zero_nyquist();
    real_part_checked(inverse(&field, &p.weight, grid)?, "green_spectral_route")
}

/// Radial inverse transform (2π)^{-n} ∫ S(|ξ|) e^{iξ·u} dξ at |u| = r for n ≤ 3.
///
/// For r > 0 the half-line is cut at the zeros of the radial kernel and the
/// partial sums are accelerated by Wynn's epsilon algorithm.
fn radial_inverse(profile: &dyn Fn(f64) -> Result<f64>, dim: usize, r: f64) -> Result<(f64, f64)> {
    let trap = ErrorTrap::new();
    let at = |k: f64| trap.catch(profile(k));
    let peak = profile(0.0)?.abs().max(f64::MIN_POSITIVE);
    if r == 0.0 {
        let c = match dim {
            1 => 1.0 / PI,
            2 => 0.5 / PI,
            3 => 0.5 / (PI * PI),
            _ => return Err(Error::Unsupported(format!("pointwise spectral route for n = {dim}"))),
        };
        let res = integrate_to_infinity(
            |k: f64| k.powi(dim as i32 - 1) * at(k),
            0.0,
            Tolerance::new(1e-13 * peak, 1e-11),
        );
        trap.check()?;
        if !res.converged {
            return Err(Error::Divergence(
                "the symbol moment diverges: G is singular where phi(x) = 0".into(),
            ));
        }
        return Ok((c * res.value, c * res.error));
    }
    let (offset, c): (f64, f64) = match dim {
        1 => (-0.5, 1.0 / PI),
        2 => (-0.25, 0.5 / PI),
        3 => (0.0, 0.5 / (PI * PI * r)),
        _ => return Err(Error::Unsupported(format!("pointwise spectral route for n = {dim}"))),
    };
    let kernel = |k: f64| -> f64 {
        match dim {
            1 => (k * r).cos(),
            2 => k * bessel_j0(k * r),
            _ => k * (k * r).sin(),
        }
    };
    let half = PI / r;
    let seg_tol = Tolerance::new(1e-14 * peak * half, SEGMENT_TOL).with_max_intervals(200);
    let mut partial = Vec::with_capacity(MAX_SEGMENTS);
    let mut sum = 0.0;
    // Rounding floor of the partial sums, kept in the error estimate.
    let mut quad_err = 0.0;
    let mut magnitude = 0.0;
    let mut previous: Option<f64> = None;
    let mut quiet = 0;
    let mut lo = 0.0;
    for m in 1..=MAX_SEGMENTS {
        let hi = (m as f64 + offset) * half;
        let seg = integrate(|k: f64| at(k) * kernel(k), lo, hi, seg_tol);
        lo = hi;
        sum += seg.value;
        quad_err += seg.error;
        magnitude += seg.value.abs();
        partial.push(sum);
        // Plain convergence for rapidly decaying symbols.
        if seg.value.abs() <= 1e-16 * sum.abs().max(peak * half) {
            quiet += 1;
            if quiet >= 3 {
                trap.check()?;
                return Ok((c * sum, c * (quad_err + ROUNDING * magnitude)));
            }
        } else {
            quiet = 0;
        }
        if partial.len() >= 6 {
            let window = &partial[partial.len().saturating_sub(40)..];
            let (estimate, _) = wynn_epsilon(window);
            if let Some(prev) = previous {
                let diff = (estimate - prev).abs();
                if diff <= 1e-12 * estimate.abs().max(1e-3 * peak) {
                    trap.check()?;
                    return Ok((c * estimate, c * (diff + quad_err + ROUNDING * magnitude)));
                }
            }
            previous = Some(estimate);
        }
    }
    trap.check()?;
    let (estimate, err) = wynn_epsilon(&partial[partial.len() - 40..]);
    if err > 1e-6 * estimate.abs() {
        return Err(Error::no_convergence(
            "green_spectral_at",
            format!("oscillatory tail not settled after {MAX_SEGMENTS} segments (error {err:e})"),
        ));
    }
    Ok((c * estimate, c * (err + quad_err + ROUNDING * magnitude)))
}

fn real_weight(p: &HilferProblem, x: &[f64], route: &str) -> Result<f64> {
    if !p.weight.is_real() {
        return Err(Error::Unsupported(format!(
            "the {route} route returns real values and needs a real weight"
        )));
    }
    let om = p.weight.value(x).re;
    if om.abs() < crate::wfourier::VANISHING_WEIGHT {
        return Err(Error::VanishingWeight {
            index: 0,
            modulus: om.abs(),
        });
    }
    Ok(om)
}

/// Pointwise spectral route: the radial inverse transform of Ĝ at |φ(x)|,
/// divided by ω(x). Free of grid periodization.
pub fn green_spectral_at(x: &[f64], t: f64, p: &HilferProblem) -> Result<GreenEvaluation> {
    check_time(t)?;
    let om = real_weight(p, x, "spectral")?;
    let r = radius(&p.geometry.map(x));
    let profile = |k: f64| symbol(k, t, p);
    let (value, err) = radial_inverse(&profile, p.dim, r)?;
    Ok(GreenEvaluation {
        x: x.to_vec(),
        t,
        value: value / om,
        route: GreenRoute::Spectral,
        error_estimate: err / om.abs(),
    })
}

struct Prefactor {
    radius: f64,
    factor: f64,
}

fn similarity_prefactor(x: &[f64], t: f64, p: &HilferProblem, route: &str) -> Result<Prefactor> {
    check_time(t)?;
    let om = real_weight(p, x, route)?;
    let r = radius(&p.geometry.map(x));
    if !(r > 0.0) {
        return Err(Error::invalid(format!(
            "the {route} route is undefined where phi(x) = 0; use the spectral route"
        )));
    }
    let n = p.dim as f64;
    let factor = PI.powf(-0.5 * n) * p.time_factor(t) / (om * r.powf(n));
    Ok(Prefactor { radius: r, factor })
}

/// Mellin contour route. The contour variable ζ of the kernel is mapped to
/// σ = -2sζ, which turns the integral into a classical inverse Mellin
/// transform in r = |φ(x)|.
pub fn green_mellin_route(x: &[f64], t: f64, p: &HilferProblem, contour: &ContourSpec) -> Result<GreenEvaluation> {
    if radius(&p.geometry.map(x)) == 0.0 {
        return origin_limit(x, t, p, GreenRoute::Mellin);
    }
    let pre = similarity_prefactor(x, t, p, "mellin")?;
    let spec = p.kernel()?;
    let s = p.s.value();
    let two_s = 2.0 * s;
    let weight_arg = 2f64.powf(two_s) * p.diffusion_scale(t);
    let kernel_arg = weight_arg / pre.radius.powf(two_s);
    let report = check_convergence(&spec, kernel_arg);
    if !report.valid {
        return Err(Error::InvalidContour(report.issues.join("; ")));
    }
    let (lo, hi) = report.separating_interval.unwrap_or((0.0, 0.0));
    let c = contour.resolve(&spec, kernel_arg);
    if !(c > lo && c < hi) {
        return Err(Error::InvalidContour(format!(
            "abscissa {c} outside the separating interval ({lo}, {hi})"
        )));
    }
    let ln_a = weight_arg.ln();
    let transform = |sigma: Complex64| -> Complex64 {
        let zeta = -sigma / two_s;
        (spec.ln_kernel(zeta) - zeta * ln_a).exp() / two_s
    };
    let strip = MellinStrip::new(-two_s * hi, -two_s * lo, -two_s * c)?;
    let control = InversionControl {
        half_height: two_s * contour.half_height,
        nodes: contour.nodes,
        tol: 1e-10,
        max_levels: 4,
    };
    let one = SpatialWeight::one();
    let line = Diffeomorphism::identity(1);
    let h = mellin_inverse_detailed(&transform, &strip, &line, &one, pre.radius, &control)
        .map_err(|e| match e {
            Error::Divergence(d) => Error::no_convergence("green_mellin_route", d),
            other => other,
        })?;
    let residue = h.value.im.abs();
    if residue > IMAGINARY_RESIDUE * h.value.re.abs().max(1.0) {
        return Err(Error::ImaginaryResidue {
            context: "green_mellin_route",
            residue,
        });
    }
    Ok(GreenEvaluation {
        x: x.to_vec(),
        t,
        value: pre.factor * h.value.re,
        route: GreenRoute::Mellin,
        error_estimate: pre.factor.abs() * h.error_estimate,
    })
}

/// Contour routes where φ(x) = 0. As r → 0 the integral is carried by the
/// pole ζ0 = n/2s of Γ(n/2 - sζ), whose residue W^{-ζ0} cancels r^{-n}; G
/// stays finite only if that pole is simple and no surviving pole precedes it.
fn origin_limit(x: &[f64], t: f64, p: &HilferProblem, route: GreenRoute) -> Result<GreenEvaluation> {
    check_time(t)?;
    let om = real_weight(p, x, route.name())?;
    let spec = p.kernel()?;
    let s = p.s.value();
    let n = p.dim as f64;
    let z0 = 0.5 * n / s;
    let (_, first) = spec
        .separating_interval()
        .ok_or_else(|| Error::InvalidContour("no separating contour between the pole families".into()))?;
    let singular = |why: String| Err(Error::Divergence(format!("G is singular where phi(x) = 0: {why}")));
    let (value, error) = if first < z0 - 1e-12 {
        return singular(format!("the pole at {first} precedes n/2s = {z0}"));
    } else if first > z0 + 1e-12 {
        (0.0, 0.0)
    } else if spec.pole_order(z0) != 1 {
        return singular(format!("the pole at n/2s = {z0} is not simple"));
    } else {
        // Θ(ζ)/Γ(n/2 - sζ) is analytic at ζ0; Richardson on symmetric
        // imaginary offsets removes the d² term.
        let rest = |d: f64| {
            let z = Complex64::new(z0, d);
            (spec.ln_kernel(z) - ln_gamma_complex(0.5 * n - s * z)).exp().re
        };
        let (coarse, fine) = (rest(1e-3), rest(5e-4));
        let a = 2f64.powf(2.0 * s) * p.diffusion_scale(t);
        let scale = PI.powf(-0.5 * n) * p.time_factor(t) / om / s * a.powf(-z0);
        (scale * (4.0 * fine - coarse) / 3.0, (scale * (fine - coarse)).abs() / 3.0)
    };
    Ok(GreenEvaluation {
        x: x.to_vec(),
        t,
        value,
        route,
        error_estimate: error,
    })
}

/// Fox-H route at Z = |φ(x)|/(λγ(t)^α)^{1/2s}.
pub fn green_foxh_route(x: &[f64], t: f64, p: &HilferProblem) -> Result<GreenEvaluation> {
    if radius(&p.geometry.map(x)) == 0.0 {
        return origin_limit(x, t, p, GreenRoute::FoxH);
    }
    let pre = similarity_prefactor(x, t, p, "foxh")?;
    let z = pre.radius / p.diffusion_scale(t).powf(0.5 / p.s.value());
    let h = fox_h_1232(p, z)?;
    Ok(GreenEvaluation {
        x: x.to_vec(),
        t,
        value: pre.factor * h.value,
        route: GreenRoute::FoxH,
        error_estimate: pre.factor.abs() * h.error_estimate,
    })
}

/// G at one point by the chosen route (pointwise spectral for `Spectral`).
pub fn green_at(route: GreenRoute, x: &[f64], t: f64, p: &HilferProblem) -> Result<GreenEvaluation> {
    match route {
        GreenRoute::Spectral => green_spectral_at(x, t, p),
        GreenRoute::Mellin => green_mellin_route(x, t, p, &p.default_contour()?),
        GreenRoute::FoxH => green_foxh_route(x, t, p),
    }
}

/// Evaluations at many points, in parallel, returned in input order.
pub fn green_batch(route: GreenRoute, points: &[Vec<f64>], t: f64, p: &HilferProblem) -> Result<Vec<GreenEvaluation>> {
    points.par_iter().map(|x| green_at(route, x, t, p)).collect()
}

/// u(·, t) = G ∗_{φ,ω} f₀, i.e. F⁻¹_{φ,ω}[Ĝ · F_{φ,ω} f₀].
pub fn solve_cauchy(f0: &GridFunction, t: f64, p: &HilferProblem) -> Result<GridFunction> {
    check_time(t)?;
    let grid = f0.grid();
    check_grid(grid, p)?;
    let symbol = symbol_field(grid, t, p, None, 1.0)?;
    check_resolution(&symbol, "solve_cauchy");
    let mut spec = forward(f0, &p.weight);
    for (v, g) in spec.values_mut().iter_mut().zip(symbol.values()) {
        *v *= g;
    }
    inverse(&spec, &p.weight, grid)
}
