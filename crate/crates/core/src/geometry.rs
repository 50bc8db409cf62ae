//! Deformations φ of ℝⁿ, spatial weights ω, temporal pairs (γ, ρ) and the
//! uniform-in-φ grids every transform runs on.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub type PointMap = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Jacobian determinants below this are treated as degenerate.
pub const DEGENERATE_JACOBIAN: f64 = 1e-14;
const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 100;
const PROBE_POINTS: usize = 100;
const PROBE_SEED: u64 = 0x5eed_0001;
const ROUND_TRIP_TOL: f64 = 1e-10;

/// One strictly increasing odd component map of ℝ.
#[derive(Clone)]
pub enum AxisMap {
    Identity,
    /// c x with c > 0
    Scale(f64),
    /// sign(x)|x|^p
    Power(f64),
    /// x³ + x
    Cubic,
    /// sinh(ax)/a
    Sinh(f64),
    /// asinh(ax)/a
    Asinh(f64),
    Custom {
        map: ScalarFn,
        inverse: ScalarFn,
        derivative: ScalarFn,
    },
}

impl fmt::Debug for AxisMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxisMap::Identity => write!(f, "Identity"),
            AxisMap::Scale(c) => write!(f, "Scale({c})"),
            AxisMap::Power(p) => write!(f, "Power({p})"),
            AxisMap::Cubic => write!(f, "Cubic"),
            AxisMap::Sinh(a) => write!(f, "Sinh({a})"),
            AxisMap::Asinh(a) => write!(f, "Asinh({a})"),
            AxisMap::Custom { .. } => write!(f, "Custom"),
        }
    }
}

impl AxisMap {
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            AxisMap::Identity => x,
            AxisMap::Scale(c) => c * x,
            AxisMap::Power(p) => x.signum() * x.abs().powf(*p),
            AxisMap::Cubic => x * x * x + x,
            AxisMap::Sinh(a) => (a * x).sinh() / a,
            AxisMap::Asinh(a) => (a * x).asinh() / a,
            AxisMap::Custom { map, .. } => map(x),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            AxisMap::Identity => 1.0,
            AxisMap::Scale(c) => *c,
            AxisMap::Power(p) => p * x.abs().powf(p - 1.0),
            AxisMap::Cubic => 3.0 * x * x + 1.0,
            AxisMap::Sinh(a) => (a * x).cosh(),
            AxisMap::Asinh(a) => 1.0 / (1.0 + a * a * x * x).sqrt(),
            AxisMap::Custom { derivative, .. } => derivative(x),
        }
    }

    pub fn inverse(&self, u: f64) -> Result<f64> {
        let x = match self {
            AxisMap::Identity => u,
            AxisMap::Scale(c) => u / c,
            AxisMap::Power(p) => u.signum() * u.abs().powf(1.0 / p),
            AxisMap::Cubic => return cubic_inverse(u),
            AxisMap::Sinh(a) => (a * u).asinh() / a,
            AxisMap::Asinh(a) => (a * u).sinh() / a,
            AxisMap::Custom { inverse, .. } => inverse(u),
        };
        if x.is_finite() {
            Ok(x)
        } else {
            Err(Error::InverseFailure {
                u: vec![u],
                detail: "inverse is not finite".into(),
            })
        }
    }
}

/// Root of x³ + x = u by Newton's method, falling back to bisection whenever
/// a step leaves the current bracket.
fn cubic_inverse(u: f64) -> Result<f64> {
    if u == 0.0 {
        return Ok(0.0);
    }
    // |x| ≤ min(|u|, |u|^{1/3}) brackets the root.
    let b = u.abs().min(u.abs().cbrt());
    let (mut lo, mut hi) = (-b, b);
    let mut x = if u.abs() < 1.0 { u } else { u.cbrt() };
    for _ in 0..NEWTON_MAX_ITER {
        let f = x * x * x + x - u;
        if f == 0.0 {
            return Ok(x);
        }
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let step = f / (3.0 * x * x + 1.0);
        if step.abs() <= NEWTON_TOL * (1.0 + x.abs()) {
            return Ok(x - step);
        }
        let next = x - step;
        x = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
    }
    Err(Error::InverseFailure {
        u: vec![u],
        detail: format!("Newton iteration did not converge in {NEWTON_MAX_ITER} steps"),
    })
}

#[derive(Clone)]
enum Structure {
    Separable(Vec<AxisMap>),
    Affine {
        matrix: Vec<f64>,
        inverse: Vec<f64>,
        shift: Vec<f64>,
        det: f64,
    },
    Coupled {
        map: PointMap,
        inverse: PointMap,
        jacobian: PointMap,
    },
}

/// A global diffeomorphism φ of ℝⁿ with its inverse and Jacobian.
#[derive(Clone)]
pub struct Diffeomorphism {
    dim: usize,
    name: String,
    structure: Structure,
}

impl fmt::Debug for Diffeomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Diffeomorphism")
            .field("dim", &self.dim)
            .field("name", &self.name)
            .field("separable", &self.is_separable())
            .finish()
    }
}

/// How to build a [`Diffeomorphism`]: a catalog entry or user callables.
pub enum GeometrySpec {
    Catalog {
        name: String,
        params: Vec<f64>,
        dim: usize,
    },
    Callables {
        dim: usize,
        map: Option<PointMap>,
        inverse: Option<PointMap>,
        jacobian: Option<PointMap>,
    },
}

impl GeometrySpec {
    pub fn catalog(name: &str, params: &[f64], dim: usize) -> Self {
        GeometrySpec::Catalog {
            name: name.to_string(),
            params: params.to_vec(),
            dim,
        }
    }
}

/// Names accepted by [`make_diffeomorphism`].
pub const GEOMETRY_CATALOG: [&str; 6] = ["identity", "affine", "power", "cubic", "sinh", "asinh"];

pub fn make_diffeomorphism(spec: GeometrySpec) -> Result<Diffeomorphism> {
    let d = match spec {
        GeometrySpec::Catalog { name, params, dim } => from_catalog(&name, &params, dim)?,
        GeometrySpec::Callables {
            dim,
            map,
            inverse,
            jacobian,
        } => {
            let map = map.ok_or_else(|| Error::invalid("user geometry needs a forward map"))?;
            let inverse =
                inverse.ok_or_else(|| Error::invalid("missing inverse for user-supplied map"))?;
            let jacobian =
                jacobian.ok_or_else(|| Error::invalid("user geometry needs a Jacobian"))?;
            Diffeomorphism {
                dim,
                name: "custom".into(),
                structure: Structure::Coupled {
                    map,
                    inverse,
                    jacobian,
                },
            }
        }
    };
    d.probe()?;
    Ok(d)
}

fn from_catalog(name: &str, params: &[f64], dim: usize) -> Result<Diffeomorphism> {
    if dim == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    let scale = |default: f64| -> Result<f64> {
        let a = params.first().copied().unwrap_or(default);
        if a > 0.0 && a.is_finite() {
            Ok(a)
        } else {
            Err(Error::invalid(format!("{name} parameter must be positive, got {a}")))
        }
    };
    let axis = match name {
        "identity" => AxisMap::Identity,
        "power" => AxisMap::Power(scale(1.0)?),
        "cubic" => AxisMap::Cubic,
        "sinh" => AxisMap::Sinh(scale(1.0)?),
        "asinh" | "log-stretch" => AxisMap::Asinh(scale(1.0)?),
        "affine" => return affine_from_params(params, dim),
        other => {
            return Err(Error::UnknownCatalog {
                kind: "geometry",
                name: other.to_string(),
            })
        }
    };
    Ok(Diffeomorphism {
        dim,
        name: name.to_string(),
        structure: Structure::Separable(vec![axis; dim]),
    })
}

// Parameters: [] → identity matrix, [c] → cI, [c, b] → cI with shift b on
// every axis, or the full n² matrix entries followed by n shifts.
fn affine_from_params(params: &[f64], dim: usize) -> Result<Diffeomorphism> {
    let mut matrix = vec![0.0; dim * dim];
    let mut shift = vec![0.0; dim];
    match params.len() {
        0 | 1 | 2 => {
            let c = params.first().copied().unwrap_or(1.0);
            for i in 0..dim {
                matrix[i * dim + i] = c;
            }
            if let Some(b) = params.get(1) {
                shift.fill(*b);
            }
        }
        len if len == dim * dim + dim => {
            matrix.copy_from_slice(&params[..dim * dim]);
            shift.copy_from_slice(&params[dim * dim..]);
        }
        len => {
            return Err(Error::invalid(format!(
                "affine expects 0, 1, 2 or {} parameters, got {len}",
                dim * dim + dim
            )))
        }
    }
    Diffeomorphism::affine(dim, matrix, shift)
}

/// Inverse and determinant by Gauss–Jordan elimination with partial pivoting.
fn invert(n: usize, a: &[f64]) -> Option<(Vec<f64>, f64)> {
    let mut m = a.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            m[i * n + col]
                .abs()
                .partial_cmp(&m[j * n + col].abs())
                .unwrap()
        })?;
        if m[pivot * n + col] == 0.0 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(pivot * n + k, col * n + k);
                inv.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        let p = m[col * n + col];
        det *= p;
        for k in 0..n {
            m[col * n + k] /= p;
            inv[col * n + k] /= p;
        }
        for row in 0..n {
            if row != col {
                let factor = m[row * n + col];
                if factor != 0.0 {
                    for k in 0..n {
                        m[row * n + k] -= factor * m[col * n + k];
                        inv[row * n + k] -= factor * inv[col * n + k];
                    }
                }
            }
        }
    }
    Some((inv, det))
}

fn determinant(n: usize, a: &[f64]) -> f64 {
    invert(n, a).map(|(_, d)| d).unwrap_or(0.0)
}

impl Diffeomorphism {
    pub fn identity(dim: usize) -> Self {
        Diffeomorphism {
            dim,
            name: "identity".into(),
            structure: Structure::Separable(vec![AxisMap::Identity; dim]),
        }
    }

    /// φ(x) = (φ₁(x₁), …, φₙ(xₙ)).
    pub fn separable(axes: Vec<AxisMap>) -> Self {
        Diffeomorphism {
            dim: axes.len(),
            name: "separable".into(),
            structure: Structure::Separable(axes),
        }
    }

    /// φ(x) = A x + b with A given row-major.
    pub fn affine(dim: usize, matrix: Vec<f64>, shift: Vec<f64>) -> Result<Self> {
        if matrix.len() != dim * dim || shift.len() != dim {
            return Err(Error::invalid("affine matrix or shift has the wrong size"));
        }
        let (inverse, det) = invert(dim, &matrix).ok_or(Error::DegenerateJacobian {
            point: vec![],
            det: 0.0,
        })?;
        if det.abs() < DEGENERATE_JACOBIAN {
            return Err(Error::DegenerateJacobian {
                point: vec![],
                det: det.abs(),
            });
        }
        Ok(Diffeomorphism {
            dim,
            name: "affine".into(),
            structure: Structure::Affine {
                matrix,
                inverse,
                shift,
                det,
            },
        })
    }

    /// One-dimensional map from user callables.
    pub fn custom_1d(map: ScalarFn, inverse: ScalarFn, derivative: ScalarFn) -> Result<Self> {
        let d = Diffeomorphism {
            dim: 1,
            name: "custom".into(),
            structure: Structure::Separable(vec![AxisMap::Custom {
                map,
                inverse,
                derivative,
            }]),
        };
        d.probe()?;
        Ok(d)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_separable(&self) -> bool {
        match &self.structure {
            Structure::Separable(_) => true,
            Structure::Affine { matrix, .. } => (0..self.dim).all(|i| {
                (0..self.dim).all(|j| i == j || matrix[i * self.dim + j] == 0.0)
            }),
            Structure::Coupled { .. } => false,
        }
    }

    /// Component map of axis `j` for separable geometries.
    pub fn axis(&self, j: usize) -> Option<AxisMap> {
        match &self.structure {
            Structure::Separable(axes) => axes.get(j).cloned(),
            _ => None,
        }
    }

    pub fn map(&self, x: &[f64]) -> Vec<f64> {
        match &self.structure {
            Structure::Separable(axes) => axes.iter().zip(x).map(|(a, &v)| a.apply(v)).collect(),
            Structure::Affine { matrix, shift, .. } => (0..self.dim)
                .map(|i| {
                    shift[i]
                        + (0..self.dim)
                            .map(|k| matrix[i * self.dim + k] * x[k])
                            .sum::<f64>()
                })
                .collect(),
            Structure::Coupled { map, .. } => map(x),
        }
    }

    pub fn inverse(&self, u: &[f64]) -> Result<Vec<f64>> {
        match &self.structure {
            Structure::Separable(axes) => axes
                .iter()
                .zip(u)
                .map(|(a, &v)| a.inverse(v))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| match e {
                    Error::InverseFailure { detail, .. } => Error::InverseFailure {
                        u: u.to_vec(),
                        detail,
                    },
                    other => other,
                }),
            Structure::Affine { inverse, shift, .. } => Ok((0..self.dim)
                .map(|i| {
                    (0..self.dim)
                        .map(|k| inverse[i * self.dim + k] * (u[k] - shift[k]))
                        .sum::<f64>()
                })
                .collect()),
            Structure::Coupled { inverse, .. } => {
                let x = inverse(u);
                if x.len() == self.dim && x.iter().all(|v| v.is_finite()) {
                    Ok(x)
                } else {
                    Err(Error::InverseFailure {
                        u: u.to_vec(),
                        detail: "user inverse returned a non-finite point".into(),
                    })
                }
            }
        }
    }

    /// Dφ(x), row-major n×n.
    pub fn jacobian(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        match &self.structure {
            Structure::Separable(axes) => {
                let mut m = vec![0.0; n * n];
                for (i, a) in axes.iter().enumerate() {
                    m[i * n + i] = a.derivative(x[i]);
                }
                m
            }
            Structure::Affine { matrix, .. } => matrix.clone(),
            Structure::Coupled { jacobian, .. } => jacobian(x),
        }
    }

    /// J_φ(x) = |det Dφ(x)|; degenerate points are errors.
    pub fn jacobian_det(&self, x: &[f64]) -> Result<f64> {
        let det = match &self.structure {
            Structure::Separable(axes) => axes
                .iter()
                .zip(x)
                .map(|(a, &v)| a.derivative(v))
                .product::<f64>(),
            Structure::Affine { det, .. } => *det,
            Structure::Coupled { jacobian, .. } => determinant(self.dim, &jacobian(x)),
        }
        .abs();
        if !(det >= DEGENERATE_JACOBIAN) || !det.is_finite() {
            return Err(Error::DegenerateJacobian {
                point: x.to_vec(),
                det,
            });
        }
        Ok(det)
    }

    // Round-trip and Jacobian check at seeded random probe points.
    fn probe(&self) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
        let mut x = vec![0.0; self.dim];
        for _ in 0..PROBE_POINTS {
            for v in x.iter_mut() {
                *v = rng.random_range(-3.0..3.0);
            }
            self.jacobian_det(&x)?;
            let back = self.inverse(&self.map(&x))?;
            let err = x.iter().zip(&back).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(err <= ROUND_TRIP_TOL * (1.0 + norm)) {
                return Err(Error::InverseFailure {
                    u: self.map(&x),
                    detail: format!("round-trip residual {err:e} at probe point {x:?}"),
                });
            }
        }
        Ok(())
    }
}

/// ω(x): a non-vanishing complex weight.
#[derive(Clone)]
pub struct SpatialWeight {
    name: String,
    real: bool,
    f: Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>,
}

impl fmt::Debug for SpatialWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpatialWeight({})", self.name)
    }
}

pub const WEIGHT_CATALOG: [&str; 4] = ["constant", "quadratic", "exp", "phase"];

impl SpatialWeight {
    pub fn one() -> Self {
        SpatialWeight::constant(1.0)
    }

    pub fn constant(c: f64) -> Self {
        SpatialWeight {
            name: format!("constant({c})"),
            real: true,
            f: Arc::new(move |_| Complex64::new(c, 0.0)),
        }
    }

    /// Catalog: `constant [c]`, `quadratic [c]` = 1 + c|x|², `exp [c]` =
    /// e^{c Σx}, `phase [k]` = e^{ik Σx}.
    pub fn from_catalog(name: &str, params: &[f64]) -> Result<Self> {
        let p = |default: f64| params.first().copied().unwrap_or(default);
        let w = match name {
            "constant" => {
                let c = p(1.0);
                if c == 0.0 {
                    return Err(Error::invalid("constant weight must be nonzero"));
                }
                SpatialWeight::constant(c)
            }
            "quadratic" => {
                let c = p(1.0);
                if c < 0.0 {
                    return Err(Error::invalid("quadratic weight needs c >= 0"));
                }
                SpatialWeight {
                    name: format!("quadratic({c})"),
                    real: true,
                    f: Arc::new(move |x| {
                        Complex64::new(1.0 + c * x.iter().map(|v| v * v).sum::<f64>(), 0.0)
                    }),
                }
            }
            "exp" => {
                let c = p(1.0);
                SpatialWeight {
                    name: format!("exp({c})"),
                    real: true,
                    f: Arc::new(move |x| Complex64::new((c * x.iter().sum::<f64>()).exp(), 0.0)),
                }
            }
            "phase" => {
                let k = p(1.0);
                SpatialWeight {
                    name: format!("phase({k})"),
                    real: false,
                    f: Arc::new(move |x| Complex64::from_polar(1.0, k * x.iter().sum::<f64>())),
                }
            }
            other => {
                return Err(Error::UnknownCatalog {
                    kind: "weight",
                    name: other.to_string(),
                })
            }
        };
        Ok(w)
    }

    pub fn custom(name: &str, real: bool, f: Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>) -> Self {
        SpatialWeight {
            name: name.to_string(),
            real,
            f,
        }
    }

    pub fn value(&self, x: &[f64]) -> Complex64 {
        (self.f)(x)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// True when the weight is known to take real values only.
    pub fn is_real(&self) -> bool {
        self.real
    }
}

/// Temporal data (γ, ρ) with the derivatives and inverse the fractional
/// operators need.
#[derive(Clone)]
pub struct TemporalPair {
    name: String,
    gamma: ScalarFn,
    gamma_prime: ScalarFn,
    gamma_inverse: ScalarFn,
    rho: ScalarFn,
    rho_prime: ScalarFn,
    rho_at_zero: f64,
}

impl fmt::Debug for TemporalPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TemporalPair({}, rho(0+)={})", self.name, self.rho_at_zero)
    }
}

pub const GAMMA_CATALOG: [&str; 3] = ["identity", "power", "expm1"];
pub const RHO_CATALOG: [&str; 3] = ["one", "exp", "power"];

impl TemporalPair {
    /// γ(t) = t, ρ ≡ 1.
    pub fn classical() -> Self {
        TemporalPair::from_catalog("identity", &[], "one", &[], None).expect("catalog entry")
    }

    /// γ catalog: `identity`, `power [p]` = t^p, `expm1 [c]` = e^{ct} - 1.
    /// ρ catalog: `one`, `exp [c]` = e^{ct}, `power [q]` = (1+t)^q.
    /// `rho_at_zero` defaults to 1.
    pub fn from_catalog(
        gamma_name: &str,
        gamma_params: &[f64],
        rho_name: &str,
        rho_params: &[f64],
        rho_at_zero: Option<f64>,
    ) -> Result<Self> {
        let gp = |d: f64| gamma_params.first().copied().unwrap_or(d);
        let (g, dg, ig): (ScalarFn, ScalarFn, ScalarFn) = match gamma_name {
            "identity" => (Arc::new(|t| t), Arc::new(|_| 1.0), Arc::new(|u| u)),
            "power" => {
                let p = gp(1.0);
                if !(p > 0.0) {
                    return Err(Error::invalid("power gamma needs p > 0"));
                }
                (
                    Arc::new(move |t: f64| t.powf(p)),
                    Arc::new(move |t: f64| p * t.powf(p - 1.0)),
                    Arc::new(move |u: f64| u.powf(1.0 / p)),
                )
            }
            "expm1" => {
                let c = gp(1.0);
                if !(c > 0.0) {
                    return Err(Error::invalid("expm1 gamma needs c > 0"));
                }
                (
                    Arc::new(move |t: f64| (c * t).exp_m1()),
                    Arc::new(move |t: f64| c * (c * t).exp()),
                    Arc::new(move |u: f64| u.ln_1p() / c),
                )
            }
            other => {
                return Err(Error::UnknownCatalog {
                    kind: "gamma",
                    name: other.to_string(),
                })
            }
        };
        let rp = |d: f64| rho_params.first().copied().unwrap_or(d);
        let (r, dr): (ScalarFn, ScalarFn) = match rho_name {
            "one" => (Arc::new(|_| 1.0), Arc::new(|_| 0.0)),
            "exp" => {
                let c = rp(1.0);
                (
                    Arc::new(move |t: f64| (c * t).exp()),
                    Arc::new(move |t: f64| c * (c * t).exp()),
                )
            }
            "power" => {
                let q = rp(1.0);
                (
                    Arc::new(move |t: f64| (1.0 + t).powf(q)),
                    Arc::new(move |t: f64| q * (1.0 + t).powf(q - 1.0)),
                )
            }
            other => {
                return Err(Error::UnknownCatalog {
                    kind: "rho",
                    name: other.to_string(),
                })
            }
        };
        let name = format!("gamma={gamma_name}{gamma_params:?}, rho={rho_name}{rho_params:?}");
        TemporalPair::custom(&name, g, dg, ig, r, dr, rho_at_zero.unwrap_or(1.0))
    }

    pub fn custom(
        name: &str,
        gamma: ScalarFn,
        gamma_prime: ScalarFn,
        gamma_inverse: ScalarFn,
        rho: ScalarFn,
        rho_prime: ScalarFn,
        rho_at_zero: f64,
    ) -> Result<Self> {
        if !(rho_at_zero > 0.0 && rho_at_zero.is_finite()) {
            return Err(Error::invalid("rho(0+) must be positive"));
        }
        for k in 1..=40 {
            let t = 0.1 * k as f64;
            if !(gamma_prime(t) > 0.0) || !(rho(t) > 0.0) || !(gamma(t) >= 0.0) {
                return Err(Error::invalid(format!(
                    "temporal pair violates gamma' > 0, gamma >= 0, rho > 0 at t={t}"
                )));
            }
        }
        Ok(TemporalPair {
            name: name.to_string(),
            gamma,
            gamma_prime,
            gamma_inverse,
            rho,
            rho_prime,
            rho_at_zero,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn gamma(&self, t: f64) -> f64 {
        (self.gamma)(t)
    }
    pub fn gamma_prime(&self, t: f64) -> f64 {
        (self.gamma_prime)(t)
    }
    pub fn gamma_inverse(&self, u: f64) -> f64 {
        (self.gamma_inverse)(u)
    }
    pub fn rho(&self, t: f64) -> f64 {
        (self.rho)(t)
    }
    pub fn rho_prime(&self, t: f64) -> f64 {
        (self.rho_prime)(t)
    }
    pub fn rho_at_zero(&self) -> f64 {
        self.rho_at_zero
    }
}

/// Tensor grid, uniform in u = φ(x), with preimages and Jacobian weights.
///
/// Nodes are cell centered, u_j = u_min + (j + 1/2) h, and stored row-major
/// with the last axis fastest.
#[derive(Clone)]
pub struct DeformedGrid {
    dim: usize,
    sizes: Vec<usize>,
    bounds: Vec<(f64, f64)>,
    spacing: Vec<f64>,
    u_axes: Vec<Vec<f64>>,
    u_nodes: Vec<f64>,
    x_nodes: Vec<f64>,
    jac_weights: Vec<f64>,
    geometry: Diffeomorphism,
}

impl fmt::Debug for DeformedGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DeformedGrid")
            .field("sizes", &self.sizes)
            .field("bounds", &self.bounds)
            .field("geometry", &self.geometry)
            .finish()
    }
}

pub fn build_grid(d: &Diffeomorphism, bounds: &[(f64, f64)], sizes: &[usize]) -> Result<Arc<DeformedGrid>> {
    let dim = d.dim();
    if bounds.len() != dim || sizes.len() != dim {
        return Err(Error::invalid(format!(
            "grid needs {dim} bounds and sizes, got {} and {}",
            bounds.len(),
            sizes.len()
        )));
    }
    for (&(lo, hi), &n) in bounds.iter().zip(sizes) {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::invalid(format!("grid bounds [{lo}, {hi}] are not increasing")));
        }
        if n < 8 {
            return Err(Error::invalid(format!("grid size {n} is below the minimum of 8")));
        }
    }
    let spacing: Vec<f64> = bounds
        .iter()
        .zip(sizes)
        .map(|(&(lo, hi), &n)| (hi - lo) / n as f64)
        .collect();
    let u_axes: Vec<Vec<f64>> = bounds
        .iter()
        .zip(sizes)
        .zip(&spacing)
        .map(|((&(lo, _), &n), &h)| (0..n).map(|j| lo + (j as f64 + 0.5) * h).collect())
        .collect();
    let total: usize = sizes.iter().product();
    let mut u_nodes = vec![0.0; total * dim];
    for k in 0..total {
        let mut rem = k;
        for ax in (0..dim).rev() {
            let i = rem % sizes[ax];
            rem /= sizes[ax];
            u_nodes[k * dim + ax] = u_axes[ax][i];
        }
    }
    let per_node: Vec<(Vec<f64>, f64)> = (0..total)
        .into_par_iter()
        .map(|k| {
            let u = &u_nodes[k * dim..(k + 1) * dim];
            let x = d.inverse(u)?;
            let j = d.jacobian_det(&x)?;
            Ok((x, j))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut x_nodes = Vec::with_capacity(total * dim);
    let mut jac_weights = Vec::with_capacity(total);
    for (x, j) in per_node {
        x_nodes.extend_from_slice(&x);
        jac_weights.push(j);
    }
    Ok(Arc::new(DeformedGrid {
        dim,
        sizes: sizes.to_vec(),
        bounds: bounds.to_vec(),
        spacing,
        u_axes,
        u_nodes,
        x_nodes,
        jac_weights,
        geometry: d.clone(),
    }))
}

impl DeformedGrid {
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }
    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }
    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }
    pub fn u_axes(&self) -> &[Vec<f64>] {
        &self.u_axes
    }
    pub fn geometry(&self) -> &Diffeomorphism {
        &self.geometry
    }
    pub fn len(&self) -> usize {
        self.jac_weights.len()
    }
    pub fn is_empty(&self) -> bool {
        self.jac_weights.is_empty()
    }
    /// Product of the u-spacings.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }
    /// u = φ(x) at node `k`.
    pub fn u(&self, k: usize) -> &[f64] {
        &self.u_nodes[k * self.dim..(k + 1) * self.dim]
    }
    /// x = φ⁻¹(u) at node `k`.
    pub fn x(&self, k: usize) -> &[f64] {
        &self.x_nodes[k * self.dim..(k + 1) * self.dim]
    }
    pub fn jac_weights(&self) -> &[f64] {
        &self.jac_weights
    }
    /// Whether two grids describe the same nodes.
    pub fn same_as(&self, other: &DeformedGrid) -> bool {
        self.sizes == other.sizes
            && self.bounds == other.bounds
            && self.geometry.name() == other.geometry.name()
            && self.x_nodes == other.x_nodes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_examples() {
        let id = make_diffeomorphism(GeometrySpec::catalog("identity", &[], 2)).unwrap();
        assert_eq!(id.map(&[0.3, -1.0]), vec![0.3, -1.0]);
        assert_eq!(id.jacobian(&[0.3, -1.0]), vec![1.0, 0.0, 0.0, 1.0]);

        let cubic = make_diffeomorphism(GeometrySpec::catalog("cubic", &[], 1)).unwrap();
        assert_eq!(cubic.map(&[1.0]), vec![2.0]);
        assert!((cubic.inverse(&[2.0]).unwrap()[0] - 1.0).abs() < 1e-14);
        assert_eq!(cubic.jacobian_det(&[1.0]).unwrap(), 4.0);

        let aff = make_diffeomorphism(GeometrySpec::catalog("affine", &[2.0], 3)).unwrap();
        assert_eq!(aff.jacobian_det(&[0.1, 0.2, 0.3]).unwrap(), 8.0);

        let mixed = Diffeomorphism::separable(vec![AxisMap::Cubic, AxisMap::Scale(2.0)]);
        assert_eq!(mixed.jacobian_det(&[1.0, 0.0]).unwrap(), 8.0);
        assert!(mixed.is_separable());
    }

    #[test]
    fn errors() {
        assert!(matches!(
            make_diffeomorphism(GeometrySpec::catalog("twist", &[], 1)),
            Err(Error::UnknownCatalog { .. })
        ));
        let missing = GeometrySpec::Callables {
            dim: 1,
            map: Some(Arc::new(|x: &[f64]| x.to_vec())),
            inverse: None,
            jacobian: Some(Arc::new(|_: &[f64]| vec![1.0])),
        };
        assert!(make_diffeomorphism(missing).is_err());
        let p = Diffeomorphism::separable(vec![AxisMap::Power(3.0)]);
        assert!(matches!(
            p.jacobian_det(&[0.0]),
            Err(Error::DegenerateJacobian { .. })
        ));
    }

    #[test]
    fn grids() {
        let id = Diffeomorphism::identity(1);
        let g = build_grid(&id, &[(-8.0, 8.0)], &[16]).unwrap();
        for k in 0..g.len() {
            assert_eq!(g.x(k), g.u(k));
            assert_eq!(g.jac_weights()[k], 1.0);
        }
        let aff = make_diffeomorphism(GeometrySpec::catalog("affine", &[2.0], 2)).unwrap();
        let g = build_grid(&aff, &[(-4.0, 4.0), (-4.0, 4.0)], &[8, 8]).unwrap();
        for k in 0..g.len() {
            assert!((g.x(k)[0] - g.u(k)[0] / 2.0).abs() < 1e-15);
            assert!((g.jac_weights()[k] - 4.0).abs() < 1e-15);
        }
        assert!(build_grid(&id, &[(-1.0, 1.0)], &[4]).is_err());
    }

    #[test]
    fn temporal_catalog() {
        let tp = TemporalPair::from_catalog("power", &[2.0], "exp", &[0.5], None).unwrap();
        assert_eq!(tp.gamma(3.0), 9.0);
        assert_eq!(tp.gamma_prime(3.0), 6.0);
        assert!((tp.gamma_inverse(9.0) - 3.0).abs() < 1e-15);
        assert!((tp.rho_prime(1.0) - 0.5 * 0.5f64.exp()).abs() < 1e-15);
        assert_eq!(tp.rho_at_zero(), 1.0);
        assert!(TemporalPair::from_catalog("log", &[], "one", &[], None).is_err());
    }
}
