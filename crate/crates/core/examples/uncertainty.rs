//! Position and momentum dispersions on a sinh-stretched line.

use std::f64::consts::PI;

use wspectral::uncertainty::{commutator_residual, dispersion_report};
use wspectral::wfourier::weighted_norm;
use wspectral::{build_grid, make_diffeomorphism, GeometrySpec, GridFunction, SpatialWeight};

/// (label, product, bound) for a Gaussian in u and a wider sech profile.
pub fn run_example() -> wspectral::Result<Vec<(&'static str, f64, f64, f64)>> {
    let phi = make_diffeomorphism(GeometrySpec::catalog("sinh", &[0.5], 1))?;
    let g = build_grid(&phi, &[(-12.0, 12.0)], &[512])?;
    let w = SpatialWeight::one();
    let profiles: [(&str, fn(f64) -> f64); 2] = [
        ("gaussian", |u| PI.powf(-0.25) * (-0.5 * u * u).exp()),
        ("sech", |u| 1.0 / u.cosh()),
    ];
    profiles
        .into_iter()
        .map(|(name, p)| {
            let raw = GridFunction::from_u_fn(&g, |u| p(u[0]).into());
            let f = raw.scaled((1.0 / weighted_norm(&raw, &w)).into());
            let r = dispersion_report(&f, &w)?;
            Ok((name, r.product, r.bound, commutator_residual(&f, &w, 0, 0)?))
        })
        .collect()
}

#[allow(dead_code)]
fn main() -> wspectral::Result<()> {
    for (name, product, bound, comm) in run_example()? {
        println!("{name:<9} product {product:.9}  bound {bound}  commutator {comm:.1e}");
    }
    Ok(())
}
