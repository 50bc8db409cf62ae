//! The H^{1,2}_{3,2} factor of the heat kernel against Z exp(-Z²/4)/2.

use wspectral::specfun::fox_h_1232;
use wspectral::HilferProblem;

/// (Z, H(Z), closed form, error estimate)
pub fn run_example() -> wspectral::Result<Vec<(f64, f64, f64, f64)>> {
    let heat = HilferProblem::trivial(1, 1.0, 1.0, 1.0)?;
    [0.25, 1.0, 2.0, 4.0]
        .into_iter()
        .map(|z| {
            let h = fox_h_1232(&heat, z)?;
            Ok((z, h.value, 0.5 * z * (-0.25 * z * z).exp(), h.error_estimate))
        })
        .collect()
}

#[allow(dead_code)]
fn main() -> wspectral::Result<()> {
    for (z, h, exact, err) in run_example()? {
        println!("Z={z:<5} H={h:.14e}  closed {exact:.14e}  est {err:.1e}");
    }
    Ok(())
}
