//! Fundamental solution by the three routes on a deformed, weighted problem.

use wspectral::solver::{green_at, GreenRoute};
use wspectral::{make_diffeomorphism, FractionalOrder, GeometrySpec, HilferOrder, HilferProblem, SpatialWeight, TemporalPair};

pub fn problem() -> wspectral::Result<HilferProblem> {
    HilferProblem::new(
        HilferOrder::new(0.8, 0.5)?,
        FractionalOrder::new(0.75)?,
        1.0,
        make_diffeomorphism(GeometrySpec::catalog("sinh", &[0.5], 1))?,
        SpatialWeight::from_catalog("quadratic", &[0.2])?,
        TemporalPair::from_catalog("power", &[1.2], "exp", &[0.1], None)?,
    )
}

/// Rows of (x, spectral, mellin, foxh).
pub fn run_example() -> wspectral::Result<Vec<[f64; 4]>> {
    let p = problem()?;
    let t = 1.0;
    [0.5, 1.0, 2.0]
        .into_iter()
        .map(|x| {
            let mut row = [x, 0.0, 0.0, 0.0];
            for (slot, route) in [GreenRoute::Spectral, GreenRoute::Mellin, GreenRoute::FoxH].into_iter().enumerate() {
                row[slot + 1] = green_at(route, &[x], t, &p)?.value;
            }
            Ok(row)
        })
        .collect()
}

#[allow(dead_code)]
fn main() -> wspectral::Result<()> {
    println!("{:>5} {:>22} {:>22} {:>22}", "x", "spectral", "mellin", "foxh");
    for [x, a, b, c] in run_example()? {
        println!("{x:>5} {a:>22.15e} {b:>22.15e} {c:>22.15e}");
    }
    Ok(())
}
