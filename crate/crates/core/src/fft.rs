//! Multi-dimensional FFT on row-major arrays with a shared plan cache.

use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut p = planner().lock().unwrap_or_else(|e| e.into_inner());
    if inverse {
        p.plan_fft_inverse(len)
    } else {
        p.plan_fft_forward(len)
    }
}

/// Unnormalized DFT along every axis: forward uses e^{-2πi jk/N}, inverse
/// e^{+2πi jk/N}.
pub fn fft_nd(data: &mut [Complex64], sizes: &[usize], inverse: bool) {
    let total: usize = sizes.iter().product();
    assert_eq!(data.len(), total, "buffer does not match grid sizes");
    let dim = sizes.len();
    for ax in 0..dim {
        let n = sizes[ax];
        let stride: usize = sizes[ax + 1..].iter().product();
        let fft = plan(n, inverse);
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        if stride == 1 {
            for line in data.chunks_exact_mut(n) {
                fft.process_with_scratch(line, &mut scratch);
            }
            continue;
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        let block = n * stride;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (i, b) in buf.iter_mut().enumerate() {
                    *b = data[base + i * stride];
                }
                fft.process_with_scratch(&mut buf, &mut scratch);
                for (i, b) in buf.iter().enumerate() {
                    data[base + i * stride] = *b;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_dimensional_round_trip() {
        let sizes = [4, 6];
        let orig: Vec<Complex64> = (0..24)
            .map(|k| Complex64::new((k as f64).sin(), (k as f64 * 0.3).cos()))
            .collect();
        let mut d = orig.clone();
        fft_nd(&mut d, &sizes, false);
        // Direct DFT of one coefficient.
        let (p, q) = (1usize, 4usize);
        let mut direct = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            for j in 0..6 {
                let ang = -2.0 * std::f64::consts::PI * ((p * i) as f64 / 4.0 + (q * j) as f64 / 6.0);
                direct += orig[i * 6 + j] * Complex64::from_polar(1.0, ang);
            }
        }
        assert!((d[p * 6 + q] - direct).norm() < 1e-12);
        fft_nd(&mut d, &sizes, true);
        for (a, b) in d.iter().zip(&orig) {
            assert!((a / 24.0 - b).norm() < 1e-14);
        }
    }
}
