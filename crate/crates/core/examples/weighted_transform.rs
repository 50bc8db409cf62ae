//! Weighted Fourier transform on a cubic deformation with a quadratic weight.
//!
//! Prints the round-trip error and the Plancherel defect; both sit at
//! rounding level for a resolved Gaussian.

use std::sync::Arc;

use num_complex::Complex64;
use wspectral::wfourier::{forward, inverse, weighted_norm};
use wspectral::{build_grid, make_diffeomorphism, DeformedGrid, GeometrySpec, GridFunction, SpatialWeight};

pub fn grid() -> wspectral::Result<Arc<DeformedGrid>> {
    let phi = make_diffeomorphism(GeometrySpec::catalog("cubic", &[], 1))?;
    build_grid(&phi, &[(-8.0, 8.0)], &[256])
}

/// (round-trip relative error, relative Plancherel defect)
pub fn run_example() -> wspectral::Result<(f64, f64)> {
    let g = grid()?;
    let w = SpatialWeight::from_catalog("quadratic", &[1.0])?;
    let f = GridFunction::from_real_fn(&g, |x| (-x[0] * x[0]).exp() * (1.0 + x[0]));
    let field = forward(&f, &w);
    let back = inverse(&field, &w, &g)?;
    let diff = back.combine(Complex64::new(1.0, 0.0), &f, Complex64::new(-1.0, 0.0))?;
    let norm = weighted_norm(&f, &w);
    Ok((weighted_norm(&diff, &w) / norm, (field.norm_squared() - norm * norm).abs() / (norm * norm)))
}

#[allow(dead_code)]
fn main() -> wspectral::Result<()> {
    let (round_trip, plancherel) = run_example()?;
    println!("round trip  {round_trip:.3e}");
    println!("plancherel  {plancherel:.3e}");
    Ok(())
}
