//! Weighted fractional Laplacian (-Δ_{φ,ω})^s and the φ,ω-Sobolev norm.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::SpatialWeight;
use crate::specfun::{hurwitz_zeta, ln_gamma, riemann_zeta};
use crate::wfourier::{apply_multiplier, divide_weight, forward, GridFunction};

use super::FractionalOrder;

/// How the hypersingular sum treats the region outside the grid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SingularBoundary {
    /// ωf is the restriction of a periodic function, matching the FFT route.
    #[default]
    Periodic,
    /// ωf is extended outside the grid by its edge values.
    Exterior,
}

/// Spectral route: multiply F_{φ,ω} f by |ξ|^{2s}.
pub fn fractional_laplacian_spectral(
    f: &GridFunction,
    w: &SpatialWeight,
    s: FractionalOrder,
) -> Result<GridFunction> {
    let two_s = 2.0 * s.value();
    apply_multiplier(
        f,
        w,
        |xi| {
            let r2: f64 = xi.iter().map(|v| v * v).sum();
            Complex64::new(r2.powf(0.5 * two_s), 0.0)
        },
        false,
    )
}

/// C_{n,s} = 4^s Γ(n/2 + s) / (π^{n/2} |Γ(-s)|).
pub fn hypersingular_constant(dim: usize, s: f64) -> f64 {
    let half_n = 0.5 * dim as f64;
    (s * 4f64.ln() + ln_gamma(half_n + s) - half_n * PI.ln() - ln_gamma(-s)).exp()
}

/// Singular-integral route with the periodic boundary treatment.
pub fn fractional_laplacian_singular(f: &GridFunction, w: &SpatialWeight, s: f64) -> Result<GridFunction> {
    fractional_laplacian_singular_with(f, w, s, SingularBoundary::Periodic)
}

/// Hypersingular principal-value sum on the u-grid for s ∈ (0, 1), n = 1.
///
/// The punctured Riemann sum is corrected by the leading near-field term
/// g''ζ(2s-1)h^{2-2s}, which lifts the order from 2-2s to 4-2s.
pub fn fractional_laplacian_singular_with(
    f: &GridFunction,
    w: &SpatialWeight,
    s: f64,
    boundary: SingularBoundary,
) -> Result<GridFunction> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::invalid(format!(
            "the singular-integral route needs s in (0, 1), got {s}"
        )));
    }
    let grid = f.grid();
    if grid.dim() != 1 {
        return Err(Error::Unsupported(
            "the singular-integral route is implemented for n = 1 only; use the spectral route".into(),
        ));
    }
    let n = grid.len();
    let h = grid.spacing()[0];
    let g: Vec<Complex64> = f
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| v * w.value(grid.x(k)))
        .collect();
    let p = 1.0 + 2.0 * s;
    let c = hypersingular_constant(1, s);
    let near = riemann_zeta(2.0 * s - 1.0) * h.powf(2.0 - 2.0 * s);
    // Kernel by index offset 1..n-1.
    let kernel: Vec<f64> = match boundary {
        SingularBoundary::Periodic => {
            let period = n as f64 * h;
            let scale = period.powf(-p);
            (0..n)
                .map(|d| {
                    if d == 0 {
                        0.0
                    } else {
                        let a = d as f64 / n as f64;
                        scale * (hurwitz_zeta(p, a) + hurwitz_zeta(p, 1.0 - a))
                    }
                })
                .collect()
        }
        SingularBoundary::Exterior => (0..n)
            .map(|d| if d == 0 { 0.0 } else { (d as f64 * h).powf(-p) })
            .collect(),
    };
    let (lo, hi) = grid.bounds()[0];
    let out: Vec<Complex64> = (0..n)
        .map(|i| {
            let gi = g[i];
            let mut acc = Complex64::new(0.0, 0.0);
            let second = match boundary {
                SingularBoundary::Periodic => {
                    for (j, gj) in g.iter().enumerate() {
                        if j != i {
                            let d = (j + n - i) % n;
                            acc += (gi - gj) * kernel[d];
                        }
                    }
                    let left = g[(i + n - 1) % n];
                    let right = g[(i + 1) % n];
                    (left - 2.0 * gi + right) / (h * h)
                }
                SingularBoundary::Exterior => {
                    for (j, gj) in g.iter().enumerate() {
                        if j != i {
                            acc += (gi - gj) * kernel[i.abs_diff(j)];
                        }
                    }
                    let left = if i == 0 { g[0] } else { g[i - 1] };
                    let right = if i + 1 == n { g[n - 1] } else { g[i + 1] };
                    let u = grid.u(i)[0];
                    let tails = (gi - g[0]) * (u - lo).powf(-2.0 * s) / (2.0 * s)
                        + (gi - g[n - 1]) * (hi - u).powf(-2.0 * s) / (2.0 * s);
                    acc += tails / h;
                    (left - 2.0 * gi + right) / (h * h)
                }
            };
            c * (acc * h + second * near)
        })
        .collect();
    divide_weight(grid, w, out)
}

/// ‖f‖_{H^s_{φ,ω}} = (∫ (1+|ξ|²)^s |F_{φ,ω} f|² dξ)^{1/2}.
pub fn sobolev_norm(f: &GridFunction, w: &SpatialWeight, s: f64) -> f64 {
    let spec = forward(f, w);
    let sum: f64 = spec
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let r2: f64 = spec.xi(k).iter().map(|x| x * x).sum();
            (1.0 + r2).powf(s) * v.norm_sqr()
        })
        .sum();
    (sum * spec.cell_volume()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grid, make_diffeomorphism, GeometrySpec};
    use crate::wfourier::weighted_norm;
    use crate::specfun::gamma;
    use std::sync::Arc;

    fn constant_via_gamma(dim: usize, s: f64) -> f64 {
        4f64.powf(s) * gamma(0.5 * dim as f64 + s).unwrap()
            / (PI.powf(0.5 * dim as f64) * gamma(-s).unwrap().abs())
    }

    fn line(name: &str, params: &[f64], lo: f64, hi: f64, n: usize) -> Arc<crate::geometry::DeformedGrid> {
        let d = make_diffeomorphism(GeometrySpec::catalog(name, params, 1)).unwrap();
        build_grid(&d, &[(lo, hi)], &[n]).unwrap()
    }

    #[test]
    fn constant_matches_gamma_form() {
        for s in [0.1, 0.5, 0.9] {
            for n in [1, 2, 3] {
                let a = hypersingular_constant(n, s);
                let b = constant_via_gamma(n, s);
                assert!((a - b).abs() < 1e-12 * b, "{n} {s}");
            }
        }
        // n = 1, s = 1/2: 1/π.
        assert!((hypersingular_constant(1, 0.5) - 1.0 / PI).abs() < 1e-14);
    }

    #[test]
    fn spectral_gaussian_s_one_is_minus_second_derivative() {
        let g = line("identity", &[], -12.0, 12.0, 256);
        let f = GridFunction::from_real_fn(&g, |x| (-x[0] * x[0]).exp());
        let lap = fractional_laplacian_spectral(&f, &SpatialWeight::one(), FractionalOrder::new(1.0).unwrap()).unwrap();
        for k in 0..g.len() {
            let x = g.x(k)[0];
            let exact = (2.0 - 4.0 * x * x) * (-x * x).exp();
            assert!((lap.values()[k].re - exact).abs() < 1e-10);
        }
    }

    #[test]
    fn singular_and_spectral_agree() {
        let g = line("identity", &[], -12.0, 12.0, 512);
        let w = SpatialWeight::one();
        let f = GridFunction::from_real_fn(&g, |x| (-x[0] * x[0]).exp());
        for s in [0.25, 0.5, 0.75] {
            let a = fractional_laplacian_spectral(&f, &w, FractionalOrder::new(s).unwrap()).unwrap();
            let b = fractional_laplacian_singular(&f, &w, s).unwrap();
            let diff = a.combine(Complex64::new(1.0, 0.0), &b, Complex64::new(-1.0, 0.0)).unwrap();
            let rel = weighted_norm(&diff, &w) / weighted_norm(&a, &w);
            assert!(rel < 5e-4, "s = {s}");
        }
    }

    #[test]
    fn exterior_mode_on_compact_bump() {
        let g = line("identity", &[], -12.0, 12.0, 512);
        let w = SpatialWeight::one();
        let f = GridFunction::from_real_fn(&g, |x| (-x[0] * x[0]).exp());
        let a = fractional_laplacian_spectral(&f, &w, FractionalOrder::new(0.5).unwrap()).unwrap();
        let b = fractional_laplacian_singular_with(&f, &w, 0.5, SingularBoundary::Exterior).unwrap();
        // The periodic images differ from the free-space tails only at O(L^{-2s-1}).
        let mid = g.len() / 2;
        assert!((a.values()[mid] - b.values()[mid]).norm() < 5e-3);
    }

    #[test]
    fn weighted_constant_is_annihilated() {
        let g = line("sinh", &[1.0], -3.0, 3.0, 128);
        let w = SpatialWeight::from_catalog("quadratic", &[0.5]).unwrap();
        let f = GridFunction::from_fn(&g, |x| Complex64::new(3.0, 0.0) / w.value(x));
        for mode in [SingularBoundary::Periodic, SingularBoundary::Exterior] {
            let out = fractional_laplacian_singular_with(&f, &w, 0.4, mode).unwrap();
            assert!(out.values().iter().all(|v| v.norm() < 1e-12));
        }
    }

    #[test]
    fn rejections() {
        let g = line("identity", &[], -1.0, 1.0, 16);
        let f = GridFunction::zeros(&g);
        assert!(fractional_laplacian_singular(&f, &SpatialWeight::one(), 1.0).is_err());
        let d2 = make_diffeomorphism(GeometrySpec::catalog("identity", &[], 2)).unwrap();
        let g2 = build_grid(&d2, &[(-1.0, 1.0), (-1.0, 1.0)], &[8, 8]).unwrap();
        let f2 = GridFunction::zeros(&g2);
        assert!(matches!(
            fractional_laplacian_singular(&f2, &SpatialWeight::one(), 0.5),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn sobolev_norm_reduces_to_l2_at_zero() {
        let g = line("cubic", &[], -2.0, 2.0, 128);
        let w = SpatialWeight::one();
        let f = GridFunction::from_u_fn(&g, |u| Complex64::new((-u[0] * u[0]).exp(), 0.0));
        let l2 = weighted_norm(&f, &w);
        assert!((sobolev_norm(&f, &w, 0.0) - l2).abs() < 1e-10);
        assert!(sobolev_norm(&f, &w, 1.0) > l2);
    }
}
