//! Heat flow of a Gaussian: the weighted convolution with G against the
//! exact spreading Gaussian.

use wspectral::solver::solve_cauchy;
use wspectral::{build_grid, GridFunction, HilferProblem};

/// Max absolute error after t = 0.5 on |x| <= 6.
pub fn run_example() -> wspectral::Result<f64> {
    let p = HilferProblem::trivial(1, 1.0, 1.0, 1.0)?;
    let g = build_grid(&p.geometry, &[(-20.0, 20.0)], &[512])?;
    let f0 = GridFunction::from_real_fn(&g, |x| (-x[0] * x[0]).exp());
    let t = 0.5;
    let u = solve_cauchy(&f0, t, &p)?;
    // exp(-x²) under the heat flow: exp(-x²/(1+4t)) / sqrt(1+4t)
    let spread = 1.0 + 4.0 * t;
    Ok((0..g.len())
        .filter(|&k| g.x(k)[0].abs() <= 6.0)
        .map(|k| {
            let x = g.x(k)[0];
            (u.values()[k].re - (-x * x / spread).exp() / spread.sqrt()).abs()
        })
        .fold(0.0, f64::max))
}

#[allow(dead_code)]
fn main() -> wspectral::Result<()> {
    println!("max error {:.3e}", run_example()?);
    Ok(())
}
