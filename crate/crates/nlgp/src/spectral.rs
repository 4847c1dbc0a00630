//! Uniform periodic grid on [-L, L), FFT-based differentiation, convolution
//! against kernels, and the Fourier multiplier 𝓛_c inverting the linearized
//! profile operator.

use std::cell::RefCell;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::kernel::Kernel;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("box half-length must be positive and finite (got {0})")]
    InvalidHalfLength(f64),
    #[error("grid size must be a power of two, at least 64 (got {0})")]
    InvalidSize(usize),
    #[error("field length {len} does not match grid size {n}")]
    LengthMismatch { len: usize, n: usize },
    #[error("field contains non-finite samples")]
    NonFinite,
    #[error("fields live on different grids")]
    GridMismatch,
    #[error(
        "Fourier multiplier is singular: min(ξ² + 2Ŵ(ξ) − c²) = {min:.3e} at ξ = {xi:.6}; \
         the speed is at or above the admissible range for this kernel"
    )]
    MultiplierSingular { min: f64, xi: f64 },
}

/// Uniform periodic grid: nodes x_j = -L + j·2L/n, frequencies ξ_k = πk/L.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    half_length: f64,
    n: usize,
}

impl Grid {
    pub fn new(half_length: f64, n: usize) -> Result<Grid, SpectralError> {
        if !half_length.is_finite() || half_length <= 0.0 {
            return Err(SpectralError::InvalidHalfLength(half_length));
        }
        if n < 64 || !n.is_power_of_two() {
            return Err(SpectralError::InvalidSize(n));
        }
        Ok(Grid { half_length, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_length / self.n as f64
    }

    /// Index of the node at x = 0.
    pub fn center(&self) -> usize {
        self.n / 2
    }

    pub fn node(&self, j: usize) -> f64 {
        -self.half_length + j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Frequency ξ_k in FFT storage order (0, 1, …, n/2−1, −n/2, …, −1)·π/L.
    pub fn freq(&self, k: usize) -> f64 {
        let signed = if k < self.n / 2 { k as isize } else { k as isize - self.n as isize };
        signed as f64 * std::f64::consts::PI / self.half_length
    }
}

/// Real samples on a grid.
#[derive(Clone, Debug)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Field, SpectralError> {
        if values.len() != grid.n() {
            return Err(SpectralError::LengthMismatch { len: values.len(), n: grid.n() });
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(SpectralError::NonFinite);
        }
        Ok(Field { grid, values })
    }

    pub(crate) fn from_parts(grid: Grid, values: Vec<f64>) -> Field {
        debug_assert_eq!(values.len(), grid.n());
        Field { grid, values }
    }

    pub fn zeros(grid: Grid) -> Field {
        Field { grid, values: vec![0.0; grid.n()] }
    }

    pub fn constant(grid: Grid, value: f64) -> Field {
        Field { grid, values: vec![value; grid.n()] }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Field {
        let values = (0..grid.n()).map(|j| f(grid.node(j))).collect();
        Field { grid, values }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Continuum-scaled L² norm, √(h Σ v²).
    pub fn l2_norm(&self) -> f64 {
        (self.grid.spacing() * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Field {
        debug_assert_eq!(self.grid, other.grid);
        let values =
            self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Field { grid: self.grid, values }
    }

    pub fn scaled(&self, s: f64) -> Field {
        self.map(|v| s * v)
    }

    /// Even part about x = 0 (node j pairs with node (n − j) mod n).
    #[allow(clippy::needless_range_loop)]
    pub fn symmetrized_even(&self) -> Field {
        let n = self.grid.n();
        let mut out = vec![0.0; n];
        for j in 0..n {
            out[j] = 0.5 * (self.values[j] + self.values[(n - j) % n]);
        }
        Field { grid: self.grid, values: out }
    }

    /// Odd part about x = 0; the self-paired node j = 0 is left unchanged
    /// (it mirrors onto the virtual node at +L).
    #[allow(clippy::needless_range_loop)]
    pub fn symmetrized_odd(&self) -> Field {
        let n = self.grid.n();
        let mut out = self.values.clone();
        for j in 1..n {
            let a = 0.5 * (self.values[j] - self.values[n - j]);
            out[j] = a;
        }
        out[n / 2] = 0.0;
        Field { grid: self.grid, values: out }
    }

    /// sup_j |v(x_j) − v(−x_j)| over the paired nodes.
    pub fn even_defect(&self) -> f64 {
        let n = self.grid.n();
        (1..n).fold(0.0f64, |m, j| m.max((self.values[j] - self.values[n - j]).abs()))
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn fft_forward(values: &[f64]) -> Vec<Complex<f64>> {
    let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()).process(&mut buf));
    buf
}

pub(crate) fn fft_inverse_real(mut spectrum: Vec<Complex<f64>>) -> Vec<f64> {
    let n = spectrum.len();
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n).process(&mut spectrum));
    let scale = 1.0 / n as f64;
    spectrum.into_iter().map(|z| z.re * scale).collect()
}

/// Apply a real frequency multiplier m(ξ_k).
fn apply_multiplier(f: &Field, m: impl Fn(f64) -> f64) -> Field {
    let grid = f.grid();
    let mut spec = fft_forward(f.values());
    for (k, z) in spec.iter_mut().enumerate() {
        *z *= m(grid.freq(k));
    }
    Field::from_parts(grid, fft_inverse_real(spec))
}

/// Spectral derivative of the given order: multiplication by (iξ)^order.
/// For odd orders the unpaired Nyquist mode is zeroed.
pub fn derivative(f: &Field, order: u32) -> Field {
    let grid = f.grid();
    let n = grid.n();
    let mut spec = fft_forward(f.values());
    for (k, z) in spec.iter_mut().enumerate() {
        if order % 2 == 1 && k == n / 2 {
            *z = Complex::new(0.0, 0.0);
            continue;
        }
        let m = Complex::new(0.0, grid.freq(k)).powu(order);
        *z *= m;
    }
    Field::from_parts(grid, fft_inverse_real(spec))
}

/// Spectral derivative of a profile that is flat near ±L but need not be
/// periodic (e.g. tanh-like fronts). The field is even-reflected about x = L
/// onto a doubled box, with the virtual node value u(L) = `right_value`,
/// differentiated there, and restricted back.
pub fn mirrored_derivative(f: &Field, right_value: f64, order: u32) -> Field {
    let grid = f.grid();
    let n = grid.n();
    let mut ext = Vec::with_capacity(2 * n);
    ext.extend_from_slice(f.values());
    ext.push(right_value);
    for j in (1..n).rev() {
        ext.push(f.values()[j]);
    }
    let mut spec = fft_forward(&ext);
    let xi0 = std::f64::consts::PI / (2.0 * grid.half_length());
    for (k, z) in spec.iter_mut().enumerate() {
        if order % 2 == 1 && k == n {
            *z = Complex::new(0.0, 0.0);
            continue;
        }
        let signed = if k < n { k as isize } else { k as isize - 2 * n as isize };
        let m = Complex::new(0.0, signed as f64 * xi0).powu(order);
        *z *= m;
    }
    let full = fft_inverse_real(spec);
    Field::from_parts(grid, full[..n].to_vec())
}

/// Periodic antiderivative with value 0 at the center node: the mean is
/// integrated exactly into a linear term, the oscillatory part spectrally.
pub(crate) fn antiderivative_centered(f: &Field) -> Field {
    let grid = f.grid();
    let n = grid.n();
    let mut spec = fft_forward(f.values());
    let mean = spec[0].re / n as f64;
    spec[0] = Complex::new(0.0, 0.0);
    for (k, z) in spec.iter_mut().enumerate().skip(1) {
        if k == n / 2 {
            *z = Complex::new(0.0, 0.0);
        } else {
            *z /= Complex::new(0.0, grid.freq(k));
        }
    }
    let periodic = fft_inverse_real(spec);
    let mut values: Vec<f64> =
        (0..n).map(|j| periodic[j] + mean * grid.node(j)).collect();
    let at_center = values[grid.center()];
    for v in &mut values {
        *v -= at_center;
    }
    Field::from_parts(grid, values)
}

/// h·Σ f (trapezoid = rectangle rule on the periodic grid).
pub fn integrate(f: &Field) -> f64 {
    f.grid().spacing() * f.values().iter().sum::<f64>()
}

/// h·Σ f·g.
pub fn inner_product(f: &Field, g: &Field) -> f64 {
    debug_assert_eq!(f.grid(), g.grid());
    f.grid().spacing() * f.values().iter().zip(g.values()).map(|(a, b)| a * b).sum::<f64>()
}

/// Circular shift of f by `shift` grid units (f(x − shift·h)), with linear
/// interpolation when the shift is not an integer.
fn shifted(f: &Field, shift: f64) -> Vec<f64> {
    let n = f.grid().n() as isize;
    let v = f.values();
    let rounded = shift.round();
    if (shift - rounded).abs() <= 1e-9 {
        let s = rounded as isize;
        (0..n).map(|j| v[(j - s).rem_euclid(n) as usize]).collect()
    } else {
        let s0 = shift.floor();
        let frac = shift - s0;
        let s0 = s0 as isize;
        (0..n)
            .map(|j| {
                let a = v[(j - s0).rem_euclid(n) as usize];
                let b = v[(j - s0 - 1).rem_euclid(n) as usize];
                (1.0 - frac) * a + frac * b
            })
            .collect()
    }
}

/// 𝒲 ∗ f: atoms by (interpolated) shifts, density by Fourier multiplication
/// with the density's transform. When every atom sits on the grid this equals
/// multiplication by Ŵ(ξ_k) in frequency space.
pub fn convolve(kernel: &Kernel, f: &Field) -> Field {
    let grid = f.grid();
    let h = grid.spacing();
    let mut out = if kernel.has_density() {
        apply_multiplier(f, |xi| kernel.density_hat(xi)).into_values()
    } else {
        vec![0.0; grid.n()]
    };
    for atom in kernel.atoms() {
        let sh = shifted(f, atom.position / h);
        for (o, s) in out.iter_mut().zip(sh) {
            *o += atom.weight * s;
        }
    }
    Field::from_parts(grid, out)
}

/// The multiplier L_c(ξ) = 1/(ξ² + 2Ŵ(ξ) − c²) applied in frequency space.
/// Fails when the denominator is not uniformly positive on the grid.
pub fn apply_lc(kernel: &Kernel, c: f64, f: &Field) -> Result<Field, SpectralError> {
    check_lc_admissible(kernel, c, &f.grid())?;
    Ok(apply_multiplier(f, |xi| 1.0 / lc_denominator(kernel, c, xi)))
}

pub(crate) fn lc_denominator(kernel: &Kernel, c: f64, xi: f64) -> f64 {
    xi * xi + 2.0 * kernel.fourier_hat(xi) - c * c
}

pub(crate) fn check_lc_admissible(
    kernel: &Kernel,
    c: f64,
    grid: &Grid,
) -> Result<(), SpectralError> {
    let mut min = f64::INFINITY;
    let mut at = 0.0;
    for k in 0..grid.n() {
        let xi = grid.freq(k);
        let d = lc_denominator(kernel, c, xi);
        if d < min {
            min = d;
            at = xi;
        }
    }
    if min <= 1e-10 {
        return Err(SpectralError::MultiplierSingular { min, xi: at });
    }
    Ok(())
}

/// The constant-coefficient operator −f″ + 2𝒲∗f − c²f applied spectrally
/// (the inverse of 𝓛_c on the grid).
pub fn apply_lc_inverse(kernel: &Kernel, c: f64, f: &Field) -> Field {
    apply_multiplier(f, |xi| lc_denominator(kernel, c, xi))
}
