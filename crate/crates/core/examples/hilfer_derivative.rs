//! Weighted Hilfer calculus: the power rule and the Laplace symbol of a
//! Caputo-type derivative.

use num_complex::Complex64;
use wspectral::fracops::{generalized_laplace, weighted_fractional_integral, weighted_hilfer_derivative, TimeSignal};
use wspectral::specfun::gamma;
use wspectral::{HilferOrder, TemporalPair};

pub struct Outcome {
    pub power_rule: f64,
    pub laplace: f64,
}

pub fn run_example() -> wspectral::Result<Outcome> {
    let tp = TemporalPair::from_catalog("power", &[1.3], "exp", &[0.2], None)?;
    // I^a (γ^k/ρ) = Γ(k+1)/Γ(k+a+1) γ^{k+a}/ρ
    let (a, k, t) = (0.5, 1.0, 1.5);
    let psi = |s: f64| tp.gamma(s).powf(k) / tp.rho(s);
    let v = weighted_fractional_integral(&psi, a, &tp, t)?;
    let exact = gamma(k + 1.0)? / gamma(k + a + 1.0)? * tp.gamma(t).powf(k + a) / tp.rho(t);

    // With γ = t and ρ = 1, L[D^{α,1} e^{-t}](z) = z^α/(z+1) - z^{α-1}.
    let plain = TemporalPair::from_catalog("identity", &[], "one", &[], None)?;
    let order = HilferOrder::new(0.5, 1.0)?;
    let signal = TimeSignal::with_derivative(|s: f64| (-s).exp(), |s: f64| -(-s).exp());
    let d = |s: f64| weighted_hilfer_derivative(&signal, order, &plain, s).unwrap_or(f64::NAN);
    let z = 2.0f64;
    let l = generalized_laplace(&d, &plain, Complex64::new(z, 0.0), 40.0)?;
    let symbol = z.sqrt() / (z + 1.0) - 1.0 / z.sqrt();
    Ok(Outcome {
        power_rule: (v - exact).abs() / exact,
        laplace: (l.re - symbol).abs(),
    })
}

#[allow(dead_code)]
fn main() -> wspectral::Result<()> {
    let o = run_example()?;
    println!("power rule relative error  {:.3e}", o.power_rule);
    println!("Laplace symbol error       {:.3e}", o.laplace);
    Ok(())
}
