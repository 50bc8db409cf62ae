//! Bessel J₀ on the real line, for the two-dimensional radial transform.

use std::f64::consts::PI;

/// J₀(x) from the periodic trapezoid rule on (1/2π)∫cos(x cos θ)dθ for
/// |x| ≤ 60 and the Hankel asymptotic expansion beyond.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= 60.0 {
        // Aliasing error is of order J_N(x), negligible once N exceeds 1.2x + 60.
        let n = (1.2 * x + 60.0) as usize;
        let step = 2.0 * PI / n as f64;
        let sum: f64 = (0..n).map(|k| (x * (k as f64 * step).cos()).cos()).sum();
        return sum / n as f64;
    }
    // a_k = ∏_{j=1}^{k} (2j-1)² / (k! 8^k)
    let mut p = 0.0;
    let mut q = 0.0;
    let mut a = 1.0;
    for k in 0..12 {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            a *= odd * odd / (k as f64 * 8.0 * x);
        }
        match k % 4 {
            0 => p += a,
            1 => q -= a,
            2 => p -= a,
            _ => q += a,
        }
    }
    let phase = x - 0.25 * PI;
    (2.0 / (PI * x)).sqrt() * (p * phase.cos() - q * phase.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert!((bessel_j0(0.0) - 1.0).abs() < 1e-15);
        assert!((bessel_j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-14);
        assert!(bessel_j0(2.404_825_557_695_773).abs() < 1e-14);
        assert!((bessel_j0(100.0) - 0.019_985_850_304_223_33).abs() < 1e-14);
        // Both branches at the switch; reference values from scipy.special.j0.
        assert!((bessel_j0(60.0) + 0.091_471_804_089_062_01).abs() < 1e-14);
        assert!((bessel_j0(60.000_000_001) + 0.091_471_804_089_062_01).abs() < 2e-10);
    }
}
