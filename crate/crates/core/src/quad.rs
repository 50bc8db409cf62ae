//! Adaptive Gauss–Kronrod quadrature and sequence acceleration.
//!
//! Everything here is generic over [`QuadValue`] so the same driver serves
//! real and complex integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn norm(&self) -> f64;
    fn is_finite_value(&self) -> bool;
}

impl QuadValue for f64 {
    fn norm(&self) -> f64 {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn norm(&self) -> f64 {
        Complex64::norm(*self)
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances for the adaptive driver. Convergence is declared when the
/// summed error estimate drops below `max(abs, rel * |I|)`.
#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            max_intervals: 4000,
        }
    }

    pub const fn with_max_intervals(mut self, n: usize) -> Self {
        self.max_intervals = n;
        self
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-12, 1e-12)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadResult<V> {
    pub value: V,
    pub error: f64,
    pub intervals: usize,
    pub converged: bool,
}

impl<V: QuadValue> QuadResult<V> {
    /// Turns a non-converged result into an error.
    pub fn require(self, routine: &'static str) -> Result<V> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::no_convergence(
                routine,
                format!(
                    "error estimate {:e} after {} intervals",
                    self.error, self.intervals
                ),
            ))
        }
    }
}

struct Segment<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
}

impl<V> PartialEq for Segment<V> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<V> Eq for Segment<V> {}
impl<V> PartialOrd for Segment<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Segment<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

fn gk15<V: QuadValue, F: FnMut(f64) -> V>(f: &mut F, a: f64, b: f64) -> (V, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron = kron + s * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    let mut err = (kron - gauss).norm();
    if !kron.is_finite_value() {
        err = f64::INFINITY;
    }
    (kron, err)
}

/// Globally adaptive GK15 over `[a, b]`, with optional interior breakpoints.
pub fn integrate_with_breaks<V, F>(mut f: F, points: &[f64], tol: Tolerance) -> QuadResult<V>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    let mut heap = BinaryHeap::new();
    let mut total = V::default();
    let mut total_err = 0.0;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b == a {
            continue;
        }
        let (v, e) = gk15(&mut f, a, b);
        total = total + v;
        total_err += e;
        heap.push(Segment {
            a,
            b,
            value: v,
            error: e,
        });
    }
    let mut count = heap.len();
    loop {
        let target = tol.abs.max(tol.rel * total.norm());
        if total_err <= target {
            return QuadResult {
                value: total,
                error: total_err,
                intervals: count,
                converged: true,
            };
        }
        if count >= tol.max_intervals {
            break;
        }
        let Some(seg) = heap.pop() else { break };
        let m = 0.5 * (seg.a + seg.b);
        if (seg.b - seg.a).abs() <= 4.0 * f64::EPSILON * m.abs().max(f64::MIN_POSITIVE) {
            // Interval cannot be split further; keep it and stop refining it.
            let stuck = seg.error;
            heap.push(Segment { error: 0.0, ..seg });
            total_err -= stuck;
            total_err += stuck.min(target * 1e-3);
            continue;
        }
        let (v1, e1) = gk15(&mut f, seg.a, m);
        let (v2, e2) = gk15(&mut f, m, seg.b);
        total = total - seg.value + v1 + v2;
        total_err = total_err - seg.error + e1 + e2;
        heap.push(Segment {
            a: seg.a,
            b: m,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: m,
            b: seg.b,
            value: v2,
            error: e2,
        });
        count += 1;
    }
    // Recompute the sum from segments to shed accumulated cancellation.
    let mut value = V::default();
    let mut error = 0.0;
    for s in heap.iter() {
        value = value + s.value;
        error += s.error;
    }
    QuadResult {
        value,
        error,
        intervals: count,
        converged: error <= tol.abs.max(tol.rel * value.norm()),
    }
}

pub fn integrate<V, F>(f: F, a: f64, b: f64, tol: Tolerance) -> QuadResult<V>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    integrate_with_breaks(f, &[a, b], tol)
}

/// `∫_a^∞ f` through the map `x = a + t / (1 - t)`.
pub fn integrate_to_infinity<V, F>(mut f: F, a: f64, tol: Tolerance) -> QuadResult<V>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    integrate_with_breaks(
        move |t: f64| {
            let one_minus = 1.0 - t;
            let x = a + t / one_minus;
            let jac = 1.0 / (one_minus * one_minus);
            let v = f(x);
            if jac.is_finite() {
                v * jac
            } else {
                V::default()
            }
        },
        &[0.0, 0.5, 0.9, 1.0],
        tol,
    )
}

/// Holds the first error raised inside a quadrature callback, which itself
/// must return a plain value.
pub(crate) struct ErrorTrap(std::cell::RefCell<Option<Error>>);

impl ErrorTrap {
    pub(crate) fn new() -> Self {
        ErrorTrap(std::cell::RefCell::new(None))
    }

    pub(crate) fn catch<V: Default>(&self, r: Result<V>) -> V {
        match r {
            Ok(v) => v,
            Err(e) => {
                self.0.borrow_mut().get_or_insert(e);
                V::default()
            }
        }
    }

    pub(crate) fn check(self) -> Result<()> {
        match self.0.into_inner() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

const TS_FIRST_STEP: f64 = 0.5;
const TS_REACH: f64 = 6.1;
const TS_MAX_LEVEL: usize = 10;
const TS_NEGLIGIBLE: f64 = 1e-20;

/// A tanh-sinh node. Both endpoint distances are exact even where `x`
/// itself rounds onto an endpoint.
#[derive(Clone, Copy, Debug)]
pub struct TsNode {
    pub x: f64,
    pub from_a: f64,
    pub to_b: f64,
    pub weight: f64,
}

/// Tanh-sinh rule on `[a, b]`, refined by step halving until two levels
/// agree. The callback returns the weighted term `weight · f(x)`, which lets
/// a singular factor be folded into the tiny endpoint weights before it can
/// overflow.
pub fn tanh_sinh_weighted<V, F>(mut f: F, a: f64, b: f64, tol: Tolerance) -> QuadResult<V>
where
    V: QuadValue,
    F: FnMut(TsNode) -> V,
{
    let half = 0.5 * (b - a);
    let node = |t: f64| {
        let u = 0.5 * PI * t.sinh();
        let e = (-2.0 * u).exp();
        let near = 2.0 * half * e / (1.0 + e);
        let far = 2.0 * half / (1.0 + e);
        let w = half * 0.5 * PI * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
        (near, far, w)
    };
    // The coarse level fixes how far out each side is worth sampling: past
    // t = 1 the weighted terms decay double exponentially.
    let mut reach = [TS_REACH; 2];
    let mut h = TS_FIRST_STEP;
    let (_, far0, w0) = node(0.0);
    let mut sum = f(TsNode { x: b - far0, from_a: far0, to_b: far0, weight: w0 });
    let mut evals = 1usize;
    for (side, limit) in reach.iter_mut().enumerate() {
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            let (near, far, w) = node(t);
            if t > TS_REACH || near < f64::MIN_POSITIVE {
                *limit = t.min(TS_REACH);
                break;
            }
            let term = if side == 0 {
                f(TsNode { x: a + near, from_a: near, to_b: far, weight: w })
            } else {
                f(TsNode { x: b - near, from_a: far, to_b: near, weight: w })
            };
            evals += 1;
            sum = sum + term;
            if t > 1.0 && term.norm() <= TS_NEGLIGIBLE * sum.norm() {
                *limit = t;
                break;
            }
            k += 1;
        }
    }
    let mut value = sum * h;
    let mut error = f64::INFINITY;
    let mut last_diff = f64::INFINITY;
    for level in 1..=TS_MAX_LEVEL {
        h *= 0.5;
        let mut t = h;
        while t < reach[0].max(reach[1]) {
            let (near, far, w) = node(t);
            if t < reach[0] {
                sum = sum + f(TsNode { x: a + near, from_a: near, to_b: far, weight: w });
                evals += 1;
            }
            if t < reach[1] {
                sum = sum + f(TsNode { x: b - near, from_a: far, to_b: near, weight: w });
                evals += 1;
            }
            t += 2.0 * h;
        }
        let next = sum * h;
        let diff = (next - value).norm();
        // Once in the asymptotic regime each halving roughly doubles the
        // correct digits, so diff²/last_diff bounds the remaining error.
        error = if diff < 0.1 * last_diff { diff * diff / last_diff } else { diff };
        last_diff = diff;
        value = next;
        if !value.is_finite_value() {
            break;
        }
        if level >= 3 && error <= tol.abs.max(tol.rel * value.norm()) {
            break;
        }
    }
    QuadResult {
        value,
        error,
        intervals: evals,
        converged: error <= tol.abs.max(tol.rel * value.norm()),
    }
}

/// [`tanh_sinh_weighted`] for an ordinary integrand of `(x, x - a, b - x)`.
pub fn tanh_sinh<V, F>(mut f: F, a: f64, b: f64, tol: Tolerance) -> QuadResult<V>
where
    V: QuadValue,
    F: FnMut(f64, f64, f64) -> V,
{
    tanh_sinh_weighted(|n| f(n.x, n.from_a, n.to_b) * n.weight, a, b, tol)
}

/// Wynn's epsilon algorithm applied to a sequence of partial sums.
///
/// Returns the best extrapolated limit and an error estimate taken from the
/// spread of the last diagonal entries.
pub fn wynn_epsilon<V: QuadValue + std::ops::Div<Output = V> + From<f64>>(seq: &[V]) -> (V, f64) {
    let n = seq.len();
    if n == 0 {
        return (V::default(), f64::INFINITY);
    }
    if n < 3 {
        let last = seq[n - 1];
        let err = if n == 2 {
            (seq[1] - seq[0]).norm()
        } else {
            f64::INFINITY
        };
        return (last, err);
    }
    // e[k] holds column k of the epsilon table, indexed by starting position.
    let mut prev: Vec<V> = vec![V::default(); n + 1];
    let mut cur: Vec<V> = seq.to_vec();
    let mut estimates: Vec<V> = vec![seq[n - 1]];
    let mut col = 0usize;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            let back = if col == 0 { V::default() } else { prev[i + 1] };
            if diff.norm() < 1e-300 {
                // Stalled column: the sequence has converged already.
                let v = if col.is_multiple_of(2) { cur[i + 1] } else { *estimates.last().unwrap_or(&cur[i + 1]) };
                return (v, diff.norm());
            }
            next.push(back + V::from(1.0) / diff);
        }
        prev = cur;
        cur = next;
        col += 1;
        if col.is_multiple_of(2) {
            if let Some(last) = cur.last() {
                estimates.push(*last);
            }
        }
    }
    let m = estimates.len();
    let best = estimates[m - 1];
    let err = if m >= 3 {
        (estimates[m - 1] - estimates[m - 2]).norm() + (estimates[m - 2] - estimates[m - 3]).norm()
    } else if m == 2 {
        (estimates[1] - estimates[0]).norm()
    } else {
        f64::INFINITY
    };
    (best, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tanh_sinh_handles_both_endpoints() {
        // ∫_0^2 x^-0.9 (2-x)^-0.5 dx = 2^-0.4 B(0.1, 0.5)
        let r = tanh_sinh(|_, da, db| da.powf(-0.9) * db.powf(-0.5), 0.0, 2.0, Tolerance::new(0.0, 1e-12));
        let beta = crate::specfun::gamma(0.1).unwrap() * crate::specfun::gamma(0.5).unwrap()
            / crate::specfun::gamma(0.6).unwrap();
        let exact = 2f64.powf(-0.4) * beta;
        assert!(r.converged);
        assert!((r.value - exact).abs() < 1e-9 * exact, "{} vs {exact}", r.value);
    }

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x: f64| x.powi(5) - 3.0 * x, 0.0, 2.0, Tolerance::default());
        assert!(r.converged);
        assert!((r.value - (64.0 / 6.0 - 6.0)).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity() {
        let r = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, Tolerance::new(1e-11, 0.0));
        assert!(r.converged, "{r:?}");
        assert!((r.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn semi_infinite_exponential() {
        let r = integrate_to_infinity(|x: f64| (-x).exp(), 0.0, Tolerance::new(1e-13, 1e-13));
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complex_oscillation() {
        let r = integrate(
            |x: f64| Complex64::new(0.0, 3.0 * x).exp(),
            0.0,
            std::f64::consts::PI,
            Tolerance::default(),
        );
        let exact = (Complex64::new(0.0, 3.0 * std::f64::consts::PI).exp() - 1.0) / Complex64::new(0.0, 3.0);
        assert!((r.value - exact).norm() < 1e-12);
    }

    #[test]
    fn epsilon_accelerates_alternating_series() {
        // ln 2 = 1 - 1/2 + 1/3 - ...
        let mut partial = Vec::new();
        let mut s = 0.0;
        for k in 1..=20 {
            s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
            partial.push(s);
        }
        let (v, _) = wynn_epsilon(&partial);
        assert!((v - 2f64.ln()).abs() < 1e-12, "{v}");
    }
}
