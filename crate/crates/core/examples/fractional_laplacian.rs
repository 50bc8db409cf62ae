//! Spectral and hypersingular fractional Laplacians of a Gaussian on the line.

use num_complex::Complex64;
use wspectral::fracops::{fractional_laplacian_singular, fractional_laplacian_spectral};
use wspectral::wfourier::weighted_norm;
use wspectral::{build_grid, make_diffeomorphism, FractionalOrder, GeometrySpec, GridFunction, SpatialWeight};

/// Relative L2 gap between the two forms at each size.
pub fn run_example() -> wspectral::Result<Vec<(usize, f64)>> {
    let phi = make_diffeomorphism(GeometrySpec::catalog("identity", &[], 1))?;
    let w = SpatialWeight::one();
    [64, 128, 256]
        .into_iter()
        .map(|n| {
            let g = build_grid(&phi, &[(-12.0, 12.0)], &[n])?;
            let f = GridFunction::from_real_fn(&g, |x| (-x[0] * x[0]).exp());
            let spectral = fractional_laplacian_spectral(&f, &w, FractionalOrder::new(0.5)?)?;
            let singular = fractional_laplacian_singular(&f, &w, 0.5)?;
            let d = singular.combine(Complex64::new(1.0, 0.0), &spectral, Complex64::new(-1.0, 0.0))?;
            Ok((n, weighted_norm(&d, &w) / weighted_norm(&spectral, &w)))
        })
        .collect()
}

#[allow(dead_code)]
fn main() -> wspectral::Result<()> {
    for (n, gap) in run_example()? {
        println!("N={n:<4} relative gap {gap:.3e}");
    }
    Ok(())
}
