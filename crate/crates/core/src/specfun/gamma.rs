//! Gamma function on the complex plane (Lanczos, g = 7, nine terms) with
//! reflection, plus the real-argument helpers used in series coefficients.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_7;
const LN_PI: f64 = 1.144_729_885_849_400_2;

/// Distance below which a nonpositive integer counts as a pole hit.
pub const POLE_TOLERANCE: f64 = 1e-12;

fn lanczos_sum(z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(LANCZOS[0], 0.0);
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += *c / (z + k as f64);
    }
    acc
}

// ln Γ(z) for Re z >= 1/2.
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let zm = z - 1.0;
    let t = zm + LANCZOS_G + 0.5;
    HALF_LN_2PI + (zm + 0.5) * t.ln() - t + lanczos_sum(zm).ln()
}

/// A logarithm of sin(πz) that stays finite for large |Im z|.
///
/// Only the exponential of the result is meaningful; the branch is not
/// continuous across the real axis.
pub fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im.abs() < 8.0 {
        return (z * PI).sin().ln();
    }
    if z.im < 0.0 {
        return ln_sin_pi(z.conj()).conj();
    }
    // sin(πz) = e^{-iπz} (e^{2iπz} - 1) / (2i), with |e^{2iπz}| small.
    let i = Complex64::i();
    let e2 = (i * 2.0 * PI * z).exp();
    -i * PI * z + ((e2 - 1.0) / (2.0 * i)).ln()
}

/// ln Γ(z) on the complex plane, accurate to its exponential (the branch of
/// the imaginary part is not normalized).
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    if z.re >= 0.5 {
        ln_gamma_right(z)
    } else {
        LN_PI - ln_sin_pi(z) - ln_gamma_right(1.0 - z)
    }
}

fn near_pole(z: Complex64) -> bool {
    if z.re > 0.5 {
        return false;
    }
    let k = z.re.round();
    (z - k).norm() < POLE_TOLERANCE
}

/// Γ(z) for complex z; nonpositive integers are rejected.
pub fn gamma_complex(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::invalid(format!("gamma argument {z} is not finite")));
    }
    if near_pole(z) {
        return Err(Error::PoleProximity(format!(
            "Gamma has a pole at {}",
            z.re.round()
        )));
    }
    if z.re >= 0.5 {
        Ok(ln_gamma_right(z).exp())
    } else {
        let s = (z * PI).sin();
        Ok(PI / (s * ln_gamma_right(1.0 - z).exp()))
    }
}

/// 1/Γ(z), entire; returns zero at the poles of Γ.
pub fn rgamma_complex(z: Complex64) -> Complex64 {
    if near_pole(z) {
        return Complex64::new(0.0, 0.0);
    }
    if z.re >= 0.5 {
        (-ln_gamma_right(z)).exp()
    } else {
        (z * PI).sin() * ln_gamma_right(1.0 - z).exp() / PI
    }
}

fn ln_gamma_pos(x: f64) -> f64 {
    let xm = x - 1.0;
    let mut acc = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (xm + k as f64);
    }
    let t = xm + LANCZOS_G + 0.5;
    HALF_LN_2PI + (xm + 0.5) * t.ln() - t + acc.ln()
}

/// ln |Γ(x)| for real x off the poles.
pub fn ln_gamma(x: f64) -> f64 {
    if x >= 0.5 {
        ln_gamma_pos(x)
    } else {
        LN_PI - (PI * x).sin().abs().ln() - ln_gamma_pos(1.0 - x)
    }
}

/// Γ(x) for real x; nonpositive integers yield an error.
pub fn gamma(x: f64) -> Result<f64> {
    if x <= 0.0 && (x - x.round()).abs() < POLE_TOLERANCE {
        return Err(Error::PoleProximity(format!(
            "Gamma has a pole at {}",
            x.round()
        )));
    }
    Ok(gamma_unchecked(x))
}

pub(crate) fn gamma_unchecked(x: f64) -> f64 {
    if x >= 0.5 {
        if x < 171.0 && x == x.round() {
            // Exact factorials where they are representable.
            let mut p = 1.0;
            let mut k = 2.0;
            while k < x {
                p *= k;
                k += 1.0;
            }
            return p;
        }
        ln_gamma_pos(x).exp()
    } else {
        PI / ((PI * x).sin() * ln_gamma_pos(1.0 - x).exp())
    }
}

/// 1/Γ(x) for real x, zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && (x - x.round()).abs() < POLE_TOLERANCE {
        return 0.0;
    }
    if x >= 0.5 {
        if x > 171.0 {
            return (-ln_gamma_pos(x)).exp();
        }
        1.0 / gamma_unchecked(x)
    } else {
        (PI * x).sin() * ln_gamma_pos(1.0 - x).exp() / PI
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent oracle: shift to large argument with the recurrence, then
    // use the Stirling series there.
    fn ln_gamma_oracle(z: Complex64) -> Complex64 {
        let shift = 50;
        let mut ln_prod = Complex64::new(0.0, 0.0);
        for k in 0..shift {
            ln_prod += (z + k as f64).ln();
        }
        let w = z + shift as f64;
        // Bernoulli-number coefficients B_{2k} / (2k (2k-1)).
        let coeffs = [
            1.0 / 12.0,
            -1.0 / 360.0,
            1.0 / 1260.0,
            -1.0 / 1680.0,
            1.0 / 1188.0,
            -691.0 / 360_360.0,
            1.0 / 156.0,
        ];
        let mut series = Complex64::new(0.0, 0.0);
        let winv = 1.0 / w;
        let w2 = winv * winv;
        let mut pow = winv;
        for c in coeffs {
            series += pow * c;
            pow *= w2;
        }
        (w - 0.5) * w.ln() - w + HALF_LN_2PI + series - ln_prod
    }

    #[test]
    fn basic_values() {
        let one = gamma_complex(Complex64::new(1.0, 0.0)).unwrap();
        assert!((one - 1.0).norm() < 1e-14);
        let half = gamma_complex(Complex64::new(0.5, 0.0)).unwrap();
        assert!((half.re - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(5.0).unwrap() - 24.0).abs() < 1e-12);
        assert!((gamma(-0.5).unwrap() + 2.0 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn matches_stirling_oracle() {
        for &(re, im) in &[(2.0, 3.0), (0.7, -4.2), (-2.3, 1.1), (10.5, 0.25), (-7.6, -3.0)] {
            let z = Complex64::new(re, im);
            let g = gamma_complex(z).unwrap();
            let oracle = ln_gamma_oracle(z).exp();
            assert!((g - oracle).norm() <= 1e-12 * oracle.norm(), "z={z}");
        }
    }

    #[test]
    fn log_form_at_large_imaginary_part() {
        let z = Complex64::new(-3.25, 80.0);
        let a = ln_gamma_complex(z);
        let b = ln_gamma_oracle(z);
        // Same modulus and same phase modulo 2π.
        assert!((a.re - b.re).abs() < 1e-10);
        let dphase = (a.im - b.im).rem_euclid(2.0 * PI);
        assert!(dphase.min(2.0 * PI - dphase) < 1e-9);
    }

    #[test]
    fn poles_are_rejected() {
        assert!(matches!(
            gamma_complex(Complex64::new(-3.0, 0.0)),
            Err(Error::PoleProximity(_))
        ));
        assert_eq!(rgamma(-2.0), 0.0);
        assert_eq!(rgamma(0.0), 0.0);
    }
}
