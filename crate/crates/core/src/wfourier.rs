//! Weighted Fourier transform F_{φ,ω} and the operators it diagonalizes.
//!
//! With u = φ(x) and g = (ωf)∘φ⁻¹ the transform is the unitary classical one,
//!
//! F(ξ) = (2π)^{-n/2} ∫ e^{-iξ·u} g(u) du,
//!
//! evaluated by FFT on the uniform u-grid with an explicit phase for the grid
//! offset. The inverse divides by ω at the nodes.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::fft_nd;
use crate::geometry::{DeformedGrid, SpatialWeight};

/// Weights with modulus below this cannot be divided out.
pub const VANISHING_WEIGHT: f64 = 1e-14;

/// Samples of f at the x-nodes of a grid.
#[derive(Clone, Debug)]
pub struct GridFunction {
    grid: Arc<DeformedGrid>,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: &Arc<DeformedGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::invalid("grid function has non-finite entries"));
        }
        Ok(GridFunction {
            grid: Arc::clone(grid),
            values,
        })
    }

    /// Samples `f(x)` at every node.
    pub fn from_fn<F: Fn(&[f64]) -> Complex64>(grid: &Arc<DeformedGrid>, f: F) -> Self {
        let values = (0..grid.len()).map(|k| f(grid.x(k))).collect();
        GridFunction {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn from_real_fn<F: Fn(&[f64]) -> f64>(grid: &Arc<DeformedGrid>, f: F) -> Self {
        GridFunction::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    /// Samples `g(u)` with u = φ(x) at every node.
    pub fn from_u_fn<F: Fn(&[f64]) -> Complex64>(grid: &Arc<DeformedGrid>, g: F) -> Self {
        let values = (0..grid.len()).map(|k| g(grid.u(k))).collect();
        GridFunction {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn zeros(grid: &Arc<DeformedGrid>) -> Self {
        GridFunction {
            grid: Arc::clone(grid),
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> &Arc<DeformedGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn scaled(&self, a: Complex64) -> Self {
        GridFunction {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| v * a).collect(),
        }
    }

    /// a·self + b·other.
    pub fn combine(&self, a: Complex64, other: &GridFunction, b: Complex64) -> Result<Self> {
        same_grid(&self.grid, &other.grid)?;
        Ok(GridFunction {
            grid: Arc::clone(&self.grid),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }

    /// Nodewise product with a function of x.
    pub fn multiply_by<F: Fn(&[f64]) -> Complex64>(&self, f: F) -> Self {
        GridFunction {
            grid: Arc::clone(&self.grid),
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(k, v)| v * f(self.grid.x(k)))
                .collect(),
        }
    }
}

pub(crate) fn same_grid(a: &Arc<DeformedGrid>, b: &Arc<DeformedGrid>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a.same_as(b) {
        Ok(())
    } else {
        Err(Error::GridMismatch("functions live on different grids".into()))
    }
}

/// Samples of F_{φ,ω} f at the DFT frequencies ξ_k = 2πk/(N h).
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Arc<DeformedGrid>,
    xi_axes: Vec<Vec<f64>>,
    values: Vec<Complex64>,
}

/// Frequencies conjugate to each u-axis, in DFT order.
pub fn frequency_axes(grid: &DeformedGrid) -> Vec<Vec<f64>> {
    grid.sizes()
        .iter()
        .zip(grid.spacing())
        .map(|(&n, &h)| {
            let dxi = 2.0 * PI / (n as f64 * h);
            (0..n)
                .map(|k| {
                    let kk = if k < n.div_ceil(2) { k as i64 } else { k as i64 - n as i64 };
                    kk as f64 * dxi
                })
                .collect()
        })
        .collect()
}

impl SpectralField {
    /// A field sampled from `f(ξ)` on the frequencies of `grid`.
    pub fn from_fn<F: Fn(&[f64]) -> Complex64>(grid: &Arc<DeformedGrid>, f: F) -> Self {
        let xi_axes = frequency_axes(grid);
        let dim = grid.dim();
        let mut xi = vec![0.0; dim];
        let values = (0..grid.len())
            .map(|k| {
                fill_xi(&xi_axes, grid.sizes(), k, &mut xi);
                f(&xi)
            })
            .collect();
        SpectralField {
            grid: Arc::clone(grid),
            xi_axes,
            values,
        }
    }

    pub fn grid(&self) -> &Arc<DeformedGrid> {
        &self.grid
    }

    pub fn xi_axes(&self) -> &[Vec<f64>] {
        &self.xi_axes
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Frequency vector of node `k`.
    pub fn xi(&self, k: usize) -> Vec<f64> {
        let mut xi = vec![0.0; self.grid.dim()];
        fill_xi(&self.xi_axes, self.grid.sizes(), k, &mut xi);
        xi
    }

    /// Π Δξ_j.
    pub fn cell_volume(&self) -> f64 {
        self.grid
            .sizes()
            .iter()
            .zip(self.grid.spacing())
            .map(|(&n, &h)| 2.0 * PI / (n as f64 * h))
            .product()
    }

    /// Multiplies every sample by `m(ξ)`.
    pub fn apply<F: Fn(&[f64]) -> Complex64>(&mut self, m: F) {
        let dim = self.grid.dim();
        let mut xi = vec![0.0; dim];
        for k in 0..self.values.len() {
            fill_xi(&self.xi_axes, self.grid.sizes(), k, &mut xi);
            self.values[k] *= m(&xi);
        }
    }

    /// Σ |F|² Πdξ.
    pub fn norm_squared(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.cell_volume()
    }

    /// Sets every sample on a Nyquist plane (index N/2 of an even axis) to 0.
    pub fn zero_nyquist(&mut self) {
        let sizes = self.grid.sizes().to_vec();
        let mut idx = vec![0usize; sizes.len()];
        for k in 0..self.values.len() {
            unravel(&sizes, k, &mut idx);
            if idx
                .iter()
                .zip(&sizes)
                .any(|(&i, &n)| n % 2 == 0 && i == n / 2)
            {
                self.values[k] = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// max |F| on the outer 10% frequency shell divided by max |F|.
    pub fn decay_ratio(&self) -> f64 {
        let sizes = self.grid.sizes().to_vec();
        let xi_max: Vec<f64> = self
            .xi_axes
            .iter()
            .map(|a| a.iter().fold(0.0f64, |m, v| m.max(v.abs())))
            .collect();
        let mut idx = vec![0usize; sizes.len()];
        let mut peak = 0.0f64;
        let mut shell = 0.0f64;
        for (k, v) in self.values.iter().enumerate() {
            let m = v.norm();
            peak = peak.max(m);
            unravel(&sizes, k, &mut idx);
            let outer = idx
                .iter()
                .enumerate()
                .any(|(d, &i)| self.xi_axes[d][i].abs() >= 0.9 * xi_max[d]);
            if outer {
                shell = shell.max(m);
            }
        }
        if peak == 0.0 {
            0.0
        } else {
            shell / peak
        }
    }
}

pub(crate) fn unravel(sizes: &[usize], mut k: usize, idx: &mut [usize]) {
    for ax in (0..sizes.len()).rev() {
        idx[ax] = k % sizes[ax];
        k /= sizes[ax];
    }
}

fn fill_xi(axes: &[Vec<f64>], sizes: &[usize], mut k: usize, xi: &mut [f64]) {
    for ax in (0..sizes.len()).rev() {
        xi[ax] = axes[ax][k % sizes[ax]];
        k /= sizes[ax];
    }
}

// Per-axis factor h e^{∓iξ u0}, combined over axes for every node.
fn offset_phases(grid: &DeformedGrid, xi_axes: &[Vec<f64>], sign: f64) -> Vec<Vec<Complex64>> {
    xi_axes
        .iter()
        .zip(grid.u_axes())
        .map(|(xis, us)| {
            let u0 = us[0];
            xis.iter()
                .map(|&xi| Complex64::from_polar(1.0, sign * xi * u0))
                .collect()
        })
        .collect()
}

fn apply_phases(values: &mut [Complex64], sizes: &[usize], phases: &[Vec<Complex64>], scale: f64) {
    let mut idx = vec![0usize; sizes.len()];
    for (k, v) in values.iter_mut().enumerate() {
        unravel(sizes, k, &mut idx);
        let mut p = Complex64::new(scale, 0.0);
        for (ax, &i) in idx.iter().enumerate() {
            p *= phases[ax][i];
        }
        *v *= p;
    }
}

/// ‖f‖_{φ,ω} = (∫ |f|² |ω|² J_φ dx)^{1/2}, as the Riemann sum Σ |ωf|² Πh over
/// the uniform u-grid (J_φ times the x-cell is the u-cell).
pub fn weighted_norm(f: &GridFunction, w: &SpatialWeight) -> f64 {
    let grid = f.grid();
    let s: f64 = f
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| (v * w.value(grid.x(k))).norm_sqr())
        .sum();
    (s * grid.cell_volume()).sqrt()
}

/// ⟨f, g⟩_{φ,ω} = ∫ f conj(g) |ω|² J_φ dx.
pub fn inner_product(f: &GridFunction, g: &GridFunction, w: &SpatialWeight) -> Result<Complex64> {
    same_grid(f.grid(), g.grid())?;
    let grid = f.grid();
    let s: Complex64 = f
        .values
        .iter()
        .zip(&g.values)
        .enumerate()
        .map(|(k, (a, b))| a * b.conj() * w.value(grid.x(k)).norm_sqr())
        .sum();
    Ok(s * grid.cell_volume())
}

/// ⟨F, G⟩ = Σ F conj(G) Πdξ.
pub fn spectral_inner_product(a: &SpectralField, b: &SpectralField) -> Result<Complex64> {
    same_grid(a.grid(), b.grid())?;
    let s: Complex64 = a.values.iter().zip(&b.values).map(|(x, y)| x * y.conj()).sum();
    Ok(s * a.cell_volume())
}

/// F_{φ,ω} f on the DFT frequencies of the grid.
pub fn forward(f: &GridFunction, w: &SpatialWeight) -> SpectralField {
    let grid = f.grid();
    let mut data: Vec<Complex64> = f
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| v * w.value(grid.x(k)))
        .collect();
    forward_u(grid, &mut data);
    SpectralField {
        grid: Arc::clone(grid),
        xi_axes: frequency_axes(grid),
        values: data,
    }
}

// Classical unitary transform of samples already expressed in u.
fn forward_u(grid: &DeformedGrid, data: &mut [Complex64]) {
    let xi_axes = frequency_axes(grid);
    fft_nd(data, grid.sizes(), false);
    let n = grid.dim() as f64;
    let scale = (2.0 * PI).powf(-0.5 * n) * grid.cell_volume();
    let phases = offset_phases(grid, &xi_axes, -1.0);
    apply_phases(data, grid.sizes(), &phases, scale);
}

// Inverse of `forward_u`, returning samples of g(u).
fn inverse_u(field: &SpectralField) -> Vec<Complex64> {
    let grid = field.grid();
    let mut data = field.values.clone();
    let n = grid.dim() as f64;
    let phases = offset_phases(grid, &field.xi_axes, 1.0);
    apply_phases(&mut data, grid.sizes(), &phases, 1.0);
    fft_nd(&mut data, grid.sizes(), true);
    let scale = (2.0 * PI).powf(-0.5 * n) * field.cell_volume();
    for v in data.iter_mut() {
        *v *= scale;
    }
    data
}

/// F⁻¹_{φ,ω}: the classical inverse in u followed by division by ω(x).
pub fn inverse(field: &SpectralField, w: &SpatialWeight, grid: &Arc<DeformedGrid>) -> Result<GridFunction> {
    same_grid(field.grid(), grid)?;
    let g = inverse_u(field);
    divide_weight(grid, w, g)
}

pub(crate) fn divide_weight(
    grid: &Arc<DeformedGrid>,
    w: &SpatialWeight,
    mut g: Vec<Complex64>,
) -> Result<GridFunction> {
    for (k, v) in g.iter_mut().enumerate() {
        let om = w.value(grid.x(k));
        if om.norm() < VANISHING_WEIGHT {
            return Err(Error::VanishingWeight {
                index: k,
                modulus: om.norm(),
            });
        }
        *v /= om;
    }
    GridFunction::new(grid, g)
}

/// Inverse transform of the product of F_{φ,ω} f with a multiplier m(ξ).
pub fn apply_multiplier<M: Fn(&[f64]) -> Complex64>(
    f: &GridFunction,
    w: &SpatialWeight,
    m: M,
    zero_nyquist: bool,
) -> Result<GridFunction> {
    let mut spec = forward(f, w);
    spec.apply(m);
    if zero_nyquist {
        spec.zero_nyquist();
    }
    inverse(&spec, w, f.grid())
}

/// (1/ω) ∂/∂u_j (ωf ∘ φ⁻¹), computed spectrally.
pub fn weighted_gradient(f: &GridFunction, w: &SpatialWeight, j: usize) -> Result<GridFunction> {
    let dim = f.grid().dim();
    if j >= dim {
        return Err(Error::invalid(format!("axis {j} out of range for dimension {dim}")));
    }
    let n = f.grid().sizes()[j];
    let mut spec = forward(f, w);
    spec.apply(|xi| Complex64::new(0.0, xi[j]));
    if n.is_multiple_of(2) {
        // Only the differentiated axis loses its unpaired Nyquist mode.
        let sizes = f.grid().sizes().to_vec();
        let mut idx = vec![0usize; dim];
        for (k, v) in spec.values.iter_mut().enumerate() {
            unravel(&sizes, k, &mut idx);
            if idx[j] == n / 2 {
                *v = Complex64::new(0.0, 0.0);
            }
        }
    }
    inverse(&spec, w, f.grid())
}

/// f ∗_{φ,ω} g, whose transform is F f · F g.
pub fn weighted_convolution(f: &GridFunction, g: &GridFunction, w: &SpatialWeight) -> Result<GridFunction> {
    same_grid(f.grid(), g.grid())?;
    let mut a = forward(f, w);
    let b = forward(g, w);
    for (x, y) in a.values.iter_mut().zip(&b.values) {
        *x *= y;
    }
    inverse(&a, w, f.grid())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grid, Diffeomorphism, GeometrySpec, make_diffeomorphism};

    fn line(geometry: &str, lo: f64, hi: f64, n: usize) -> Arc<DeformedGrid> {
        let d = make_diffeomorphism(GeometrySpec::catalog(geometry, &[], 1)).unwrap();
        build_grid(&d, &[(lo, hi)], &[n]).unwrap()
    }

    #[test]
    fn gaussian_norm_and_spectrum() {
        let g = line("identity", -12.0, 12.0, 512);
        let f = GridFunction::from_real_fn(&g, |x| (-0.5 * x[0] * x[0]).exp());
        let one = SpatialWeight::one();
        let norm = weighted_norm(&f, &one);
        assert!((norm - PI.sqrt().sqrt()).abs() < 1e-8);
        assert_eq!(weighted_norm(&f, &SpatialWeight::constant(2.0)), 2.0 * norm);
        let spec = forward(&f, &one);
        for k in 0..g.len() {
            let xi = spec.xi(k)[0];
            assert!((spec.values()[k] - (-0.5 * xi * xi).exp()).norm() < 1e-8);
        }
    }

    #[test]
    fn deformed_gaussian_has_classical_spectrum() {
        let g = line("cubic", -12.0, 12.0, 512);
        let f = GridFunction::from_u_fn(&g, |u| Complex64::new((-0.5 * u[0] * u[0]).exp(), 0.0));
        let spec = forward(&f, &SpatialWeight::one());
        for k in 0..g.len() {
            let xi = spec.xi(k)[0];
            assert!((spec.values()[k] - (-0.5 * xi * xi).exp()).norm() < 1e-8);
        }
    }

    #[test]
    fn inverse_with_weight() {
        let g = line("cubic", -12.0, 12.0, 512);
        let w = SpatialWeight::from_catalog("quadratic", &[1.0]).unwrap();
        let spec = SpectralField::from_fn(&g, |xi| Complex64::new((-0.5 * xi[0] * xi[0]).exp(), 0.0));
        let f = inverse(&spec, &w, &g).unwrap();
        for k in 0..g.len() {
            let (x, u) = (g.x(k)[0], g.u(k)[0]);
            let exact = (-0.5 * u * u).exp() / (1.0 + x * x);
            assert!((f.values()[k] - exact).norm() < 1e-8);
        }
    }

    #[test]
    fn gradient_and_offset_grid() {
        let d = Diffeomorphism::identity(1);
        let g = build_grid(&d, &[(-10.0, 14.0)], &[512]).unwrap();
        let f = GridFunction::from_real_fn(&g, |x| (-0.5 * (x[0] - 2.0).powi(2)).exp());
        let df = weighted_gradient(&f, &SpatialWeight::one(), 0).unwrap();
        for k in 0..g.len() {
            let x = g.x(k)[0] - 2.0;
            assert!((df.values()[k].re + x * (-0.5 * x * x).exp()).abs() < 1e-7);
        }
    }

    #[test]
    fn vanishing_weight_rejected() {
        let g = line("identity", -4.0, 4.0, 16);
        let w = SpatialWeight::custom("zero", true, Arc::new(|_| Complex64::new(0.0, 0.0)));
        let spec = SpectralField::from_fn(&g, |_| Complex64::new(1.0, 0.0));
        assert!(matches!(inverse(&spec, &w, &g), Err(Error::VanishingWeight { .. })));
    }
}
