//! The built-in invariant suite, as printed by `wspec validate`.

use wspectral::validate::{validation_report, ValidateOptions};

pub fn run_example() -> wspectral::Result<bool> {
    let report = validation_report(&ValidateOptions::default())?;
    for c in &report.checks {
        println!("{:<4} {:<26} {:.2e} <= {:.0e}", if c.passed { "ok" } else { "FAIL" }, c.name, c.residual, c.limit);
    }
    Ok(report.all_passed)
}

#[allow(dead_code)]
fn main() -> wspectral::Result<()> {
    if !run_example()? {
        std::process::exit(1);
    }
    Ok(())
}
