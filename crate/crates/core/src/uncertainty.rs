//! Generalized position and momentum operators, dispersions and the
//! uncertainty product.
//!
//! T_j f = φ_j f and P_j = -i (D_{φ,ω})_j satisfy [T_j, P_k] = i δ_{jk}.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::SpatialWeight;
use crate::wfourier::{forward, inner_product, weighted_gradient, weighted_norm, GridFunction};

const NORMALIZATION_TOL: f64 = 1e-8;
const MEAN_IMAGINARY_TOL: f64 = 1e-9;

/// Position operator T_j, multiplication by φ_j(x).
pub fn apply_position(f: &GridFunction, j: usize) -> Result<GridFunction> {
    let grid = f.grid();
    if j >= grid.dim() {
        return Err(Error::invalid(format!("axis {j} out of range for dimension {}", grid.dim())));
    }
    let values = f
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| v * grid.u(k)[j])
        .collect();
    GridFunction::new(grid, values)
}

/// Momentum operator P_j = -i (D_{φ,ω})_j.
pub fn apply_momentum(f: &GridFunction, w: &SpatialWeight, j: usize) -> Result<GridFunction> {
    Ok(weighted_gradient(f, w, j)?.scaled(Complex64::new(0.0, -1.0)))
}

/// ‖(T_j P_k - P_k T_j) f - i δ_{jk} f‖ / ‖f‖ in the weighted norm.
pub fn commutator_residual(f: &GridFunction, w: &SpatialWeight, j: usize, k: usize) -> Result<f64> {
    let tp = apply_position(&apply_momentum(f, w, k)?, j)?;
    let pt = apply_momentum(&apply_position(f, j)?, w, k)?;
    let mut diff = tp.combine(Complex64::new(1.0, 0.0), &pt, Complex64::new(-1.0, 0.0))?;
    if j == k {
        diff = diff.combine(Complex64::new(1.0, 0.0), f, Complex64::new(0.0, -1.0))?;
    }
    let base = weighted_norm(f, w);
    if base == 0.0 {
        return Ok(0.0);
    }
    Ok(weighted_norm(&diff, w) / base)
}

#[derive(Clone, Debug, Serialize)]
pub struct DispersionReport {
    pub means_phi: Vec<f64>,
    pub means_xi: Vec<f64>,
    pub std_phi: Vec<f64>,
    pub std_xi: Vec<f64>,
    /// Δφ_j Δξ_j for each axis.
    pub component_products: Vec<f64>,
    /// (Σ Δφ_j)(Σ Δξ_j)
    pub product: f64,
    /// n²/4
    pub bound: f64,
    /// n²/2, from summing the per-axis bound 1/2
    pub sharp_bound: f64,
}

/// Dispersions of a unit-norm f; non-normalized input is rejected.
pub fn dispersion_report(f: &GridFunction, w: &SpatialWeight) -> Result<DispersionReport> {
    let norm = weighted_norm(f, w);
    if (norm - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::invalid(format!(
            "dispersion needs a unit-norm function, got norm {norm:.12}"
        )));
    }
    let grid = f.grid();
    let dim = grid.dim();
    let h = grid.cell_volume();
    let density: Vec<f64> = f
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| (v * w.value(grid.x(k))).norm_sqr())
        .collect();
    let real_input = w.is_real() && f.values().iter().all(|v| v.im == 0.0);
    let spec = forward(f, w);
    let spec_density: Vec<f64> = spec.values().iter().map(|v| v.norm_sqr()).collect();
    let dxi = spec.cell_volume();

    let mut means_phi = Vec::with_capacity(dim);
    let mut means_xi = Vec::with_capacity(dim);
    let mut std_phi = Vec::with_capacity(dim);
    let mut std_xi = Vec::with_capacity(dim);
    for j in 0..dim {
        let mean_u: f64 = density.iter().enumerate().map(|(k, d)| grid.u(k)[j] * d).sum::<f64>() * h;
        let mean_p = inner_product(&apply_momentum(f, w, j)?, f, w)?;
        if real_input && mean_p.im.abs() > MEAN_IMAGINARY_TOL {
            return Err(Error::ImaginaryResidue {
                context: "momentum mean",
                residue: mean_p.im.abs(),
            });
        }
        let var_u: f64 = density
            .iter()
            .enumerate()
            .map(|(k, d)| (grid.u(k)[j] - mean_u).powi(2) * d)
            .sum::<f64>()
            * h;
        let var_xi: f64 = spec_density
            .iter()
            .enumerate()
            .map(|(k, d)| (spec.xi(k)[j] - mean_p.re).powi(2) * d)
            .sum::<f64>()
            * dxi;
        means_phi.push(mean_u);
        means_xi.push(mean_p.re);
        std_phi.push(var_u.max(0.0).sqrt());
        std_xi.push(var_xi.max(0.0).sqrt());
    }
    let component_products = std_phi.iter().zip(&std_xi).map(|(a, b)| a * b).collect();
    let product = std_phi.iter().sum::<f64>() * std_xi.iter().sum::<f64>();
    let n2 = (dim * dim) as f64;
    Ok(DispersionReport {
        means_phi,
        means_xi,
        std_phi,
        std_xi,
        component_products,
        product,
        bound: 0.25 * n2,
        sharp_bound: 0.5 * n2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grid, make_diffeomorphism, GeometrySpec};
    use std::f64::consts::PI;

    #[test]
    fn gaussian_minimizer() {
        let d = make_diffeomorphism(GeometrySpec::catalog("identity", &[], 1)).unwrap();
        let g = build_grid(&d, &[(-12.0, 12.0)], &[512]).unwrap();
        let f = GridFunction::from_real_fn(&g, |x| PI.powf(-0.25) * (-0.5 * x[0] * x[0]).exp());
        let r = dispersion_report(&f, &SpatialWeight::one()).unwrap();
        assert!((r.std_phi[0] - 0.5f64.sqrt()).abs() < 1e-9);
        assert!((r.std_xi[0] - 0.5f64.sqrt()).abs() < 1e-9);
        assert!((r.product - 0.5).abs() < 1e-9);
        assert_eq!(r.bound, 0.25);
        assert!(dispersion_report(&f.scaled(Complex64::new(2.0, 0.0)), &SpatialWeight::one()).is_err());
    }

    #[test]
    fn deformed_gaussian_matches_undeformed() {
        let d = make_diffeomorphism(GeometrySpec::catalog("cubic", &[], 1)).unwrap();
        let g = build_grid(&d, &[(-12.0, 12.0)], &[512]).unwrap();
        let w = SpatialWeight::from_catalog("quadratic", &[1.0]).unwrap();
        let f = GridFunction::from_fn(&g, |x| {
            let u = x[0] * x[0] * x[0] + x[0];
            PI.powf(-0.25) * (-0.5 * u * u).exp() / w.value(x)
        });
        let r = dispersion_report(&f, &w).unwrap();
        assert!((r.product - 0.5).abs() < 1e-9);
    }

    #[test]
    fn commutator_on_both_axes() {
        let d = make_diffeomorphism(GeometrySpec::catalog("sinh", &[0.5], 2)).unwrap();
        let g = build_grid(&d, &[(-10.0, 10.0), (-10.0, 10.0)], &[96, 96]).unwrap();
        let f = GridFunction::from_u_fn(&g, |u| Complex64::new((-0.5 * (u[0] * u[0] + u[1] * u[1])).exp(), 0.0));
        let w = SpatialWeight::one();
        assert!(commutator_residual(&f, &w, 0, 0).unwrap() < 1e-6);
        assert!(commutator_residual(&f, &w, 0, 1).unwrap() < 1e-6);
        let pos = apply_position(&GridFunction::zeros(&g), 1).unwrap();
        assert!(pos.values().iter().all(|v| v.norm() == 0.0));
    }
}
