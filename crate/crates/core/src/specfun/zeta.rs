//! Riemann and Hurwitz zeta functions on the real line.

use std::f64::consts::PI;

use super::gamma::gamma_unchecked;

// Borwein's acceleration of the alternating eta series.
fn eta_borwein(x: f64) -> f64 {
    const N: usize = 30;
    let mut d = [0.0f64; N + 1];
    let n = N as f64;
    let mut term = 1.0 / n; // (n+i-1)! 4^i / ((n-i)! (2i)!) at i = 0, times n later
    let mut acc = term;
    d[0] = n * acc;
    for i in 1..=N {
        let fi = i as f64;
        term *= (n + fi - 1.0) * (n - fi + 1.0) * 4.0 / ((2.0 * fi - 1.0) * (2.0 * fi));
        acc += term;
        d[i] = n * acc;
    }
    let dn = d[N];
    let mut sum = 0.0;
    for (k, dk) in d.iter().enumerate().take(N) {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (dk - dn) / ((k + 1) as f64).powf(x);
    }
    -sum / dn
}

/// ζ(x) for real x ≠ 1.
pub fn riemann_zeta(x: f64) -> f64 {
    if x == 0.0 {
        return -0.5;
    }
    if x < 0.0 {
        // Functional equation; sin vanishes at the trivial zeros.
        let one_minus = 1.0 - x;
        return 2f64.powf(x)
            * PI.powf(x - 1.0)
            * (0.5 * PI * x).sin()
            * gamma_unchecked(one_minus)
            * riemann_zeta(one_minus);
    }
    if x > 40.0 {
        return 1.0 + 2f64.powf(-x) + 3f64.powf(-x);
    }
    eta_borwein(x) / (1.0 - 2f64.powf(1.0 - x))
}

/// Hurwitz ζ(p, a) = Σ_{k≥0} (k + a)^{-p} for a > 0, by Euler–Maclaurin
/// summation. Valid for p > 1 and, by continuation, for p ≠ 1 down to about -8.
pub fn hurwitz_zeta(p: f64, a: f64) -> f64 {
    const N: usize = 12;
    // B_{2j} / (2j)!
    const B: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30_240.0,
        -1.0 / 1_209_600.0,
        1.0 / 47_900_160.0,
        -691.0 / 1_307_674_368_000.0,
        1.0 / 74_724_249_600.0,
    ];
    let mut sum = 0.0;
    for k in 0..N {
        sum += (k as f64 + a).powf(-p);
    }
    let x = N as f64 + a;
    sum += x.powf(1.0 - p) / (p - 1.0) + 0.5 * x.powf(-p);
    // Rising factorial p (p+1) ... (p + 2j - 2) times x^{-p-2j+1}.
    let mut rising = p;
    let mut xp = x.powf(-p - 1.0);
    for (j, b) in B.iter().enumerate() {
        sum += b * rising * xp;
        let k = 2 * j as u32 + 1;
        rising *= (p + k as f64) * (p + k as f64 + 1.0);
        xp /= x * x;
    }
    sum
}
