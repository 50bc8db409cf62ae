//! Mittag-Leffler values next to their elementary special cases.

use num_complex::Complex64;
use wspectral::specfun::mittag_leffler_detailed;

pub fn run_example() -> wspectral::Result<Vec<(f64, f64, f64, f64, &'static str)>> {
    let cases = [
        (1.0, 1.0, -1.0, (-1f64).exp()),
        (2.0, 1.0, -4.0, 2f64.cos()),
        // E_{1/2}(-x) = exp(x²) erfc(x)
        (0.5, 1.0, -0.5, 0.615_690_344_192_925_9),
        (1.0, 2.0, 1.0, std::f64::consts::E - 1.0),
    ];
    cases
        .into_iter()
        .map(|(a, mu, x, exact)| {
            let e = mittag_leffler_detailed(a, mu, Complex64::new(x, 0.0))?;
            Ok((a, mu, e.value.re, exact, e.method.name()))
        })
        .collect()
}

#[allow(dead_code)]
fn main() -> wspectral::Result<()> {
    for (a, mu, v, exact, method) in run_example()? {
        println!("E[{a},{mu}]  {v:.15}  closed form {exact:.15}  ({method})");
    }
    Ok(())
}
