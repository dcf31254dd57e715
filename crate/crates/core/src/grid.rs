//! Periodic spatial discretisation of the box `L·[-π, π)` and the spectral
//! operators built on it.
//!
//! Conventions used throughout the crate:
//!
//! * nodes `x_j = -πL + 2πL·j/K` for `j = 0..K`,
//! * integer frequencies `k ∈ {-K/2, …, K/2 - 1}` with wavenumber `ξ = k/L`,
//! * forward transform `c_k = (1/K) Σ_j u_j e^{-i k x_j / L}`, so that
//!   `u_j = Σ_k c_k e^{i k x_j / L}` and `Σ_j |u_j|² = K Σ_k |c_k|²`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("number of nodes must be a positive even integer, got {0}")]
    NodeCount(usize),
    #[error("half width must be positive and finite, got {0}")]
    HalfWidth(f64),
}

/// Equidistant periodic grid with `K` nodes on `L·[-π, π)`.
pub struct PeriodicGrid {
    half_width: f64,
    nodes: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for PeriodicGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicGrid")
            .field("half_width", &self.half_width)
            .field("num_nodes", &self.nodes.len())
            .finish()
    }
}

impl PartialEq for PeriodicGrid {
    fn eq(&self, other: &Self) -> bool {
        self.half_width == other.half_width && self.nodes.len() == other.nodes.len()
    }
}

impl PeriodicGrid {
    pub fn new(half_width: f64, num_nodes: usize) -> Result<Arc<Self>, GridError> {
        if num_nodes == 0 || num_nodes % 2 != 0 {
            return Err(GridError::NodeCount(num_nodes));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(GridError::HalfWidth(half_width));
        }
        let k = num_nodes as f64;
        let nodes = (0..num_nodes)
            .map(|j| -PI * half_width + 2.0 * PI * half_width * (j as f64) / k)
            .collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(num_nodes);
        let inverse = planner.plan_fft_inverse(num_nodes);
        Ok(Arc::new(Self {
            half_width,
            nodes,
            forward,
            inverse,
        }))
    }

    /// The box half width `L` (the box is `L·[-π, π)`).
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI * self.half_width / self.nodes.len() as f64
    }

    /// Index of the node closest to `sigma` (modulo the period).
    pub fn nearest_node(&self, sigma: f64) -> usize {
        let period = 2.0 * PI * self.half_width;
        let shifted = (sigma + PI * self.half_width).rem_euclid(period);
        let j = (shifted / self.spacing()).round() as usize;
        j % self.nodes.len()
    }

    /// Integer frequency carried by position `j` of an FFT-ordered buffer.
    pub fn fft_frequency(&self, j: usize) -> i64 {
        let k = self.nodes.len();
        if j < k / 2 {
            j as i64
        } else {
            j as i64 - k as i64
        }
    }

    /// Symmetric frequency set `-K/2, …, K/2 - 1` in ascending order.
    pub fn frequencies(&self) -> impl Iterator<Item = i64> {
        let half = (self.nodes.len() / 2) as i64;
        -half..half
    }

    /// `τ K² L⁻²`, the quantity bounded by the stepping stability condition.
    pub fn cfl_number(&self, tau: f64) -> f64 {
        let k = self.nodes.len() as f64;
        tau * k * k / (self.half_width * self.half_width)
    }

    pub(crate) fn fft_forward(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.forward.process_with_scratch(buf, scratch);
    }

    pub(crate) fn fft_inverse(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.inverse.process_with_scratch(buf, scratch);
    }

    pub(crate) fn scratch_len(&self) -> usize {
        self.forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len())
    }
}

/// A complex function sampled on the nodes of a [`PeriodicGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Arc<PeriodicGrid>,
    values: Vec<Complex64>,
}

impl ComplexField {
    /// Panics if `values.len()` differs from the grid size.
    pub fn new(grid: Arc<PeriodicGrid>, values: Vec<Complex64>) -> Self {
        assert_eq!(
            values.len(),
            grid.num_nodes(),
            "field length must equal the number of grid nodes"
        );
        Self { grid, values }
    }

    pub fn from_fn(grid: &Arc<PeriodicGrid>, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Self::new(Arc::clone(grid), values)
    }

    pub fn constant(grid: &Arc<PeriodicGrid>, c: Complex64) -> Self {
        Self::new(Arc::clone(grid), vec![c; grid.num_nodes()])
    }

    pub fn zeros(grid: &Arc<PeriodicGrid>) -> Self {
        Self::constant(grid, Complex64::new(0.0, 0.0))
    }

    pub fn grid(&self) -> &Arc<PeriodicGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Pointwise map producing a new field on the same grid.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self::new(
            Arc::clone(&self.grid),
            self.values.iter().map(|&z| f(z)).collect(),
        )
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert!(
            Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid,
            "fields live on different grids"
        );
        Self::new(
            Arc::clone(&self.grid),
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    /// `Σ_j |u_j|²`.
    pub fn sum_squares(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Grid-weighted L² norm `(Δx Σ_j |u_j|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.spacing() * self.sum_squares()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Fourier coefficients `c_k`, stored at position `k + K/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: Arc<PeriodicGrid>,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: Arc<PeriodicGrid>, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), grid.num_nodes());
        Self { grid, coeffs }
    }

    /// Unit coefficient at frequency `k`, zero elsewhere.
    pub fn delta(grid: &Arc<PeriodicGrid>, k: i64) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.num_nodes()];
        let half = (grid.num_nodes() / 2) as i64;
        assert!((-half..half).contains(&k), "frequency {k} out of range");
        coeffs[(k + half) as usize] = Complex64::new(1.0, 0.0);
        Self::new(Arc::clone(grid), coeffs)
    }

    pub fn grid(&self) -> &Arc<PeriodicGrid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient at integer frequency `k ∈ [-K/2, K/2)`.
    pub fn get(&self, k: i64) -> Complex64 {
        let half = (self.grid.num_nodes() / 2) as i64;
        self.coeffs[(k + half) as usize]
    }
}

// e^{-i k x_j/L} = (-1)^k e^{-2πi kj/K} because x_0 = -πL.
fn node_phase(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn forward_dft(field: &ComplexField) -> Spectrum {
    let grid = field.grid();
    let n = grid.num_nodes();
    let mut buf = field.values().to_vec();
    let mut scratch = vec![Complex64::new(0.0, 0.0); grid.scratch_len()];
    grid.fft_forward(&mut buf, &mut scratch);
    let scale = 1.0 / n as f64;
    let half = n / 2;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for (j, &c) in buf.iter().enumerate() {
        let k = grid.fft_frequency(j);
        coeffs[(k + half as i64) as usize] = c * (scale * node_phase(k));
    }
    Spectrum::new(Arc::clone(grid), coeffs)
}

pub fn inverse_dft(spec: &Spectrum) -> ComplexField {
    let grid = spec.grid();
    let n = grid.num_nodes();
    let half = (n / 2) as i64;
    let mut buf: Vec<Complex64> = (0..n)
        .map(|j| {
            let k = grid.fft_frequency(j);
            spec.coeffs()[(k + half) as usize] * node_phase(k)
        })
        .collect();
    let mut scratch = vec![Complex64::new(0.0, 0.0); grid.scratch_len()];
    grid.fft_inverse(&mut buf, &mut scratch);
    ComplexField::new(Arc::clone(grid), buf)
}

/// Precomputed diagonal Fourier multiplier, applied in place.
///
/// The node phase `(-1)^k` cancels between the forward and inverse
/// transforms, so the multiplier acts directly on FFT-ordered data.
#[derive(Debug, Clone)]
pub struct FourierMultiplier {
    grid: Arc<PeriodicGrid>,
    // FFT order, already divided by K
    factors: Vec<Complex64>,
}

impl FourierMultiplier {
    /// Multiplier from a symbol evaluated at wavenumbers `ξ = k/L`.
    pub fn from_symbol(grid: &Arc<PeriodicGrid>, symbol: impl Fn(f64) -> Complex64) -> Self {
        let n = grid.num_nodes();
        let scale = 1.0 / n as f64;
        let factors = (0..n)
            .map(|j| symbol(grid.fft_frequency(j) as f64 / grid.half_width()) * scale)
            .collect();
        Self {
            grid: Arc::clone(grid),
            factors,
        }
    }

    /// Exact flow of `i∂_tΨ + s ∂²_σΨ = 0` over time `t`: `e^{-i t s ξ²}`.
    pub fn free_schrodinger(grid: &Arc<PeriodicGrid>, t: f64, sign: f64) -> Self {
        Self::from_symbol(grid, |xi| Complex64::from_polar(1.0, -t * sign * xi * xi))
    }

    pub fn grid(&self) -> &Arc<PeriodicGrid> {
        &self.grid
    }

    /// `scratch` must hold at least [`Self::scratch_len`] entries.
    pub fn apply_in_place(&self, values: &mut [Complex64], scratch: &mut [Complex64]) {
        self.grid.fft_forward(values, scratch);
        for (v, f) in values.iter_mut().zip(&self.factors) {
            *v *= f;
        }
        self.grid.fft_inverse(values, scratch);
    }

    pub fn scratch_len(&self) -> usize {
        self.grid.scratch_len()
    }

    pub fn apply(&self, field: &ComplexField) -> ComplexField {
        assert!(**field.grid() == *self.grid, "multiplier built for another grid");
        let mut values = field.values().to_vec();
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.scratch_len()];
        self.apply_in_place(&mut values, &mut scratch);
        ComplexField::new(Arc::clone(field.grid()), values)
    }
}

/// Solution at time `t` of `i∂_tΨ + s∂²_σΨ = 0` started from `field`,
/// where `s = alpha_sign`.
pub fn free_propagate(field: &ComplexField, t: f64, alpha_sign: f64) -> ComplexField {
    FourierMultiplier::free_schrodinger(field.grid(), t, alpha_sign).apply(field)
}

/// Multiplies every Fourier coefficient by `symbol(k/L)` and transforms back.
pub fn apply_multiplier(field: &ComplexField, symbol: impl Fn(f64) -> Complex64) -> ComplexField {
    FourierMultiplier::from_symbol(field.grid(), symbol).apply(field)
}
