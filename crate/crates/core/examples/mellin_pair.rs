//! phi-Mellin pair for phi(x) = x²: forward reproduces Gamma, inverse
//! recovers exp(-x²) from it.

use num_complex::Complex64;
use wspectral::mellin::{mellin_forward, mellin_inverse, InversionControl, MellinStrip};
use wspectral::specfun::{gamma, gamma_complex};
use wspectral::{make_diffeomorphism, GeometrySpec, SpatialWeight};

/// (worst forward error, worst inverse error)
pub fn run_example() -> wspectral::Result<(f64, f64)> {
    let phi = make_diffeomorphism(GeometrySpec::catalog("power", &[2.0], 1))?;
    let w = SpatialWeight::one();
    let f = |x: f64| (-x * x).exp();
    let mut forward_err = 0.0f64;
    for s in [0.7, 1.3, 2.5] {
        let v = mellin_forward(&f, &phi, &w, Complex64::new(s, 0.0))?;
        forward_err = forward_err.max((v.re - gamma(s)?).abs());
    }
    let transform = |s: Complex64| gamma_complex(s).unwrap_or_default();
    let strip = MellinStrip::new(0.0, 8.0, 1.0)?;
    let control = InversionControl::default();
    let mut inverse_err = 0.0f64;
    for x in [0.5, 1.0, 1.5] {
        let v = mellin_inverse(&transform, &strip, &phi, &w, x, &control)?;
        inverse_err = inverse_err.max((v.re - f(x)).abs());
    }
    Ok((forward_err, inverse_err))
}

#[allow(dead_code)]
fn main() -> wspectral::Result<()> {
    let (fwd, inv) = run_example()?;
    println!("forward vs Gamma(s)    {fwd:.3e}");
    println!("inverse vs exp(-x^2)   {inv:.3e}");
    Ok(())
}
