//! Self-similar collision profiles of the symmetric reduction.
//!
//! A solution `ψ(t, σ) = √t·U(σ/√(2t))` of `i∂_tψ + ∂²_σψ - 1/(2 Re ψ) = 0`
//! corresponds to a profile pair `(U, v)` with
//!
//! ```text
//! v' = i x v - x / Re U,      U - x U' = v,      v(0) = 1,      U(x) ~ α|x|.
//! ```
//!
//! Writing `v = 1 + w`, the second equation integrates to
//! `U(x) = 1 + x(α + ∫_x^∞ w/z² dz)` and the first one makes `w` a fixed
//! point of
//!
//! ```text
//! P(w)(x) = e^{ix²/2} - 1 - e^{ix²/2} ∫_0^x y e^{-iy²/2} / Re U(y) dy,
//! ```
//!
//! which contracts on the ball
//! `E = {w : w(0) = w'(0) = 0, sup|w| + sup|w'/x| ≤ α/4}` for large `α`.
//! Only `x ≥ 0` is stored; the profile is even.
//!
//! The half line is discretised by a smooth map `x = X(ξ)` with `ξ`
//! uniform and `dξ/dx = √(a² + x²)`. Near the origin the spacing is `dξ/a`,
//! resolving the `1/(1 + αx)` scale when `a ≈ α`; far out the phase `x²/2`
//! advances by at most `dξ` per node. All integrals and derivatives are
//! fourth order in `ξ`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::FilamentPair;
use crate::grid::{ComplexField, PeriodicGrid};
use crate::quadrature::{cumulative_uniform, derivative_uniform};

use std::sync::Arc;

/// Smallest real `α` satisfying `12 + (α+8)/(2α) ≤ α/4`, i.e. the positive
/// root of `α² - 50α - 16`.
pub fn proof_safe_alpha() -> f64 {
    25.0 + 641f64.sqrt()
}

pub const DEFAULT_X_MAX: f64 = 50.0;
pub const DEFAULT_NODES: usize = 65537;
/// Upper limit of the default map scale; beyond it the origin is already
/// resolved and a larger scale only coarsens the far field.
pub const MAX_DEFAULT_SCALE: f64 = 20.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SelfSimilarError {
    #[error("Re(alpha) must be positive, got {0}")]
    Domain(String),
    #[error("iterate left the set E: norm {norm:.4} exceeds Re(alpha)/4 = {radius:.4}")]
    OutsideE { norm: f64, radius: f64 },
    #[error("tail bound sup|w|/x_max = {bound:.3e} exceeds tolerance {tolerance:.1e}; increase x_max")]
    TailTooLarge { bound: f64, tolerance: f64 },
    #[error("Re(u) = {value:.3e} <= 0 at x = {x}")]
    NonPositiveRealPart { x: f64, value: f64 },
    #[error("no contraction: update ratio above 1 for 3 consecutive iterations (last {ratio:.3})")]
    NoContraction { ratio: f64 },
    #[error("no convergence after {iterations} iterations (last update {update:.3e})")]
    MaxIterations { iterations: usize, update: f64 },
}

/// Graded grid on `[0, x_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfLineGrid {
    x_max: f64,
    scale: f64,
    step: f64,
    nodes: Vec<f64>,
    // dξ/dx at each node
    stretch: Vec<f64>,
}

fn xi_of_x(x: f64, a: f64) -> f64 {
    0.5 * x * (a * a + x * x).sqrt() + 0.5 * a * a * (x / a).asinh()
}

impl HalfLineGrid {
    /// `n` nodes with `dξ/dx = √(scale² + x²)`.
    pub fn new(x_max: f64, n: usize, scale: f64) -> Result<Self, SelfSimilarError> {
        if !(x_max > 0.0 && x_max.is_finite()) || n < 8 || !(scale > 0.0 && scale.is_finite()) {
            return Err(SelfSimilarError::Domain(format!(
                "half-line grid x_max = {x_max}, n = {n}, scale = {scale}"
            )));
        }
        let xi_max = xi_of_x(x_max, scale);
        let step = xi_max / (n - 1) as f64;
        let mut nodes = Vec::with_capacity(n);
        for i in 0..n {
            let xi = i as f64 * step;
            // Ξ is convex with Ξ(x) ≥ max(a x, x²/2), so Newton from this
            // upper bound decreases monotonically onto the root
            let mut x = (xi / scale).min((2.0 * xi).sqrt());
            for _ in 0..60 {
                let dx = (xi_of_x(x, scale) - xi) / (scale * scale + x * x).sqrt();
                x -= dx;
                if dx.abs() <= 1e-15 * (1.0 + x) {
                    break;
                }
            }
            nodes.push(x.max(0.0));
        }
        nodes[0] = 0.0;
        nodes[n - 1] = x_max;
        let stretch = nodes.iter().map(|&x| (scale * scale + x * x).sqrt()).collect();
        Ok(Self {
            x_max,
            scale,
            step,
            nodes,
            stretch,
        })
    }

    /// Default grid for a given `α`: map scale `min(Re α, 20)`.
    pub fn for_alpha(alpha: Complex64, x_max: f64, n: usize) -> Result<Self, SelfSimilarError> {
        check_alpha(alpha)?;
        Self::new(x_max, n, alpha.re.clamp(1.0, MAX_DEFAULT_SCALE))
    }

    /// Grid with the same map and twice the resolution; every node of
    /// `self` is a node of the result.
    pub fn refined(&self) -> Result<Self, SelfSimilarError> {
        Self::new(self.x_max, 2 * self.nodes.len() - 1, self.scale)
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `∫_0^{x_i} f dx` at every node.
    pub fn cumulative_integral(&self, integrand: &[Complex64]) -> Vec<Complex64> {
        let mapped: Vec<Complex64> = integrand
            .iter()
            .zip(&self.stretch)
            .map(|(f, s)| f / s)
            .collect();
        cumulative_uniform(&mapped, self.step)
    }

    /// `df/dx` at every node.
    pub fn derivative(&self, f: &[Complex64]) -> Vec<Complex64> {
        derivative_uniform(f, self.step)
            .into_iter()
            .zip(&self.stretch)
            .map(|(d, s)| d * s)
            .collect()
    }
}

/// A trial perturbation `w` together with `w'(x)/x`, both on a
/// [`HalfLineGrid`]. The second array is what the metric of `E` measures and
/// gives the finite limit `w/x² → (w'/x)(0)/2` at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileIterate {
    pub w: Vec<Complex64>,
    pub dw_over_x: Vec<Complex64>,
}

impl ProfileIterate {
    pub fn zero(grid: &HalfLineGrid) -> Self {
        let zero = vec![Complex64::new(0.0, 0.0); grid.len()];
        Self {
            w: zero.clone(),
            dw_over_x: zero,
        }
    }

    pub fn from_fn(
        grid: &HalfLineGrid,
        w: impl Fn(f64) -> Complex64,
        dw_over_x: impl Fn(f64) -> Complex64,
    ) -> Self {
        Self {
            w: grid.nodes().iter().map(|&x| w(x)).collect(),
            dw_over_x: grid.nodes().iter().map(|&x| dw_over_x(x)).collect(),
        }
    }

    /// `sup|w| + sup|w'/x|`.
    pub fn e_norm(&self) -> f64 {
        sup(&self.w) + sup(&self.dw_over_x)
    }

    /// Distance `sup|w₁-w₂| + sup|(w₁-w₂)'/x|` of the fixed-point argument.
    pub fn distance(&self, other: &Self) -> f64 {
        sup_diff(&self.w, &other.w) + sup_diff(&self.dw_over_x, &other.dw_over_x)
    }
}

fn sup(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn sup_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn check_alpha(alpha: Complex64) -> Result<(), SelfSimilarError> {
    if alpha.re > 0.0 && alpha.re.is_finite() && alpha.im.is_finite() {
        Ok(())
    } else {
        Err(SelfSimilarError::Domain(format!("alpha = {alpha}")))
    }
}

/// `U` built from `w`, together with the truncated tail integral.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledU {
    pub u: Vec<Complex64>,
    /// `∫_x^{x_max} w/z² dz` at every node.
    pub tail_integral: Vec<Complex64>,
    /// `sup|w|/x_max`, a bound on the neglected `∫_{x_max}^∞ w/z²`.
    pub tail_bound: f64,
}

/// `U(x) = 1 + x(α + ∫_x^{x_max} w/z² dz)`. The neglected tail beyond
/// `x_max` is bounded by `sup|w|/x_max` and only reported; when
/// `tail_tolerance` is given and the bound exceeds it the call fails.
pub fn u_from_w(
    iterate: &ProfileIterate,
    alpha: Complex64,
    grid: &HalfLineGrid,
    tail_tolerance: Option<f64>,
) -> Result<CoupledU, SelfSimilarError> {
    check_alpha(alpha)?;
    let radius = alpha.re / 4.0;
    let norm = iterate.e_norm();
    if norm > radius {
        return Err(SelfSimilarError::OutsideE { norm, radius });
    }
    let tail_bound = sup(&iterate.w) / grid.x_max();
    if let Some(tol) = tail_tolerance {
        if tail_bound > tol {
            return Err(SelfSimilarError::TailTooLarge {
                bound: tail_bound,
                tolerance: tol,
            });
        }
    }
    let x = grid.nodes();
    let integrand: Vec<Complex64> = (0..grid.len())
        .map(|i| {
            if i == 0 {
                0.5 * iterate.dw_over_x[0]
            } else {
                iterate.w[i] / (x[i] * x[i])
            }
        })
        .collect();
    let cumulative = grid.cumulative_integral(&integrand);
    let total = cumulative[grid.len() - 1];
    let tail_integral: Vec<Complex64> = cumulative.iter().map(|c| total - c).collect();
    let u = x
        .iter()
        .zip(&tail_integral)
        .map(|(&x, &tail)| 1.0 + x * (alpha + tail))
        .collect();
    Ok(CoupledU {
        u,
        tail_integral,
        tail_bound,
    })
}

fn apply_p_with_u(grid: &HalfLineGrid, u: &[Complex64]) -> Result<ProfileIterate, SelfSimilarError> {
    let x = grid.nodes();
    for (&x, z) in x.iter().zip(u) {
        if !(z.re > 0.0) {
            return Err(SelfSimilarError::NonPositiveRealPart { x, value: z.re });
        }
    }
    let integrand: Vec<Complex64> = x
        .iter()
        .zip(u)
        .map(|(&y, z)| Complex64::from_polar(y / z.re, -0.5 * y * y))
        .collect();
    let inner = grid.cumulative_integral(&integrand);
    let mut w = Vec::with_capacity(grid.len());
    let mut dw_over_x = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let phase = Complex64::from_polar(1.0, 0.5 * x[i] * x[i]);
        let p = phase * (1.0 - inner[i]) - 1.0;
        w.push(p);
        // P'(w) = ix(1 + P(w)) - x/Re(u)
        dw_over_x.push(Complex64::new(0.0, 1.0) * (1.0 + p) - 1.0 / u[i].re);
    }
    w[0] = Complex64::new(0.0, 0.0);
    Ok(ProfileIterate { w, dw_over_x })
}

/// One application of `P`. The result satisfies `P(w)(0) = 0` exactly and
/// carries `P(w)'/x` from the closed form `P' = ix(1 + P) - x/Re(u)`.
pub fn apply_p(
    iterate: &ProfileIterate,
    alpha: Complex64,
    grid: &HalfLineGrid,
) -> Result<ProfileIterate, SelfSimilarError> {
    let coupled = u_from_w(iterate, alpha, grid, None)?;
    apply_p_with_u(grid, &coupled.u)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub tail_tolerance: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200,
            tail_tolerance: None,
        }
    }
}

/// Converged (or trial) self-similar profile.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfSimilarProfile {
    pub alpha: Complex64,
    pub grid: HalfLineGrid,
    pub w: Vec<Complex64>,
    pub dw_over_x: Vec<Complex64>,
    pub v: Vec<Complex64>,
    pub u: Vec<Complex64>,
    pub tail_integral: Vec<Complex64>,
    pub tail_bound: f64,
    pub iterations: usize,
    pub final_update: f64,
    /// `d(w_{n+1}, w_n)` for every iteration.
    pub updates: Vec<f64>,
    slope: Vec<Complex64>,
}

impl SelfSimilarProfile {
    /// Profile assembled from an arbitrary iterate (no iterations).
    pub fn from_iterate(
        iterate: ProfileIterate,
        alpha: Complex64,
        grid: HalfLineGrid,
    ) -> Result<Self, SelfSimilarError> {
        let coupled = u_from_w(&iterate, alpha, &grid, None)?;
        Ok(Self::assemble(iterate, coupled, alpha, grid, 0, f64::NAN, Vec::new()))
    }

    fn assemble(
        iterate: ProfileIterate,
        coupled: CoupledU,
        alpha: Complex64,
        grid: HalfLineGrid,
        iterations: usize,
        final_update: f64,
        updates: Vec<f64>,
    ) -> Self {
        let v = iterate.w.iter().map(|w| 1.0 + w).collect();
        let slope = grid
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let w_over_x = if i == 0 { Complex64::new(0.0, 0.0) } else { iterate.w[i] / x };
                alpha + coupled.tail_integral[i] - w_over_x
            })
            .collect();
        Self {
            slope,
            alpha,
            grid,
            w: iterate.w,
            dw_over_x: iterate.dw_over_x,
            v,
            u: coupled.u,
            tail_integral: coupled.tail_integral,
            tail_bound: coupled.tail_bound,
            iterations,
            final_update,
            updates,
        }
    }

    /// Successive update ratios `d_{n+1}/d_n`.
    pub fn update_ratios(&self) -> Vec<f64> {
        self.updates.windows(2).map(|w| w[1] / w[0]).collect()
    }

    /// Largest update ratio once the first `burn_in` ratios are dropped.
    pub fn contraction_ratio(&self, burn_in: usize) -> f64 {
        let ratios = self.update_ratios();
        let skip = burn_in.min(ratios.len().saturating_sub(1));
        ratios[skip..].iter().copied().fold(0.0, f64::max)
    }

    /// The `K₁` for which `12/α + 2K₁/α²` equals the observed ratio
    /// (negative when the ratio is already below `12/α`).
    pub fn required_k1(&self, burn_in: usize) -> f64 {
        let a = self.alpha.re;
        (self.contraction_ratio(burn_in) - 12.0 / a) * a * a / 2.0
    }

    pub fn e_norm(&self) -> f64 {
        sup(&self.w) + sup(&self.dw_over_x)
    }

    /// `U'(x)` for `x > 0` from `U' = α + ∫_x w/z² - w/x`; at the origin this
    /// is the one-sided slope.
    pub fn u_prime(&self) -> &[Complex64] {
        &self.slope
    }

    /// Profile evaluated at any `x` (even extension), using cubic Hermite
    /// interpolation of `U` and `U'`; beyond `x_max` the asymptote
    /// `1 + αx` is used.
    pub fn u_at(&self, x: f64) -> Complex64 {
        let x = x.abs();
        let nodes = self.grid.nodes();
        if x >= self.grid.x_max() {
            return 1.0 + x * self.alpha;
        }
        let j = match nodes.binary_search_by(|n| n.partial_cmp(&x).unwrap()) {
            Ok(j) => return self.u[j],
            Err(j) => j - 1,
        };
        let (x0, x1) = (nodes[j], nodes[j + 1]);
        let h = x1 - x0;
        let s = (x - x0) / h;
        let du = &self.slope;
        let (p0, p1) = (self.u[j], self.u[j + 1]);
        let (m0, m1) = (du[j] * h, du[j + 1] * h);
        let h00 = 2.0 * s * s * s - 3.0 * s * s + 1.0;
        let h10 = s * s * s - 2.0 * s * s + s;
        let h01 = -2.0 * s * s * s + 3.0 * s * s;
        let h11 = s * s * s - s * s;
        p0 * h00 + m0 * h10 + p1 * h01 + m1 * h11
    }

    /// Filament `ψ₁(t, σ) = √t·U(σ/√(2t))`.
    pub fn psi1(&self, t: f64, sigma: f64) -> Result<Complex64, SelfSimilarError> {
        if !(t > 0.0) {
            return Err(SelfSimilarError::Domain(format!("t = {t} must be positive")));
        }
        Ok(t.sqrt() * self.u_at(sigma / (2.0 * t).sqrt()))
    }
}

/// Picard iteration `w ← P(w)` from `w = 0` until the update in the metric
/// of `E` drops below `options.tol`.
pub fn solve_fixed_point(
    alpha: Complex64,
    options: SolveOptions,
    grid: &HalfLineGrid,
) -> Result<SelfSimilarProfile, SelfSimilarError> {
    check_alpha(alpha)?;
    let mut current = ProfileIterate::zero(grid);
    let mut updates = Vec::new();
    let mut rising = 0usize;
    for iteration in 1..=options.max_iter {
        let coupled = u_from_w(&current, alpha, grid, options.tail_tolerance)?;
        let next = apply_p_with_u(grid, &coupled.u)?;
        let update = next.distance(&current);
        if let Some(&previous) = updates.last() {
            if update > previous {
                rising += 1;
                if rising >= 3 {
                    return Err(SelfSimilarError::NoContraction {
                        ratio: update / previous,
                    });
                }
            } else {
                rising = 0;
            }
        }
        updates.push(update);
        current = next;
        if update < options.tol {
            let coupled = u_from_w(&current, alpha, grid, options.tail_tolerance)?;
            return Ok(SelfSimilarProfile::assemble(
                current,
                coupled,
                alpha,
                grid.clone(),
                iteration,
                update,
                updates,
            ));
        }
    }
    Err(SelfSimilarError::MaxIterations {
        iterations: options.max_iter,
        update: updates.last().copied().unwrap_or(f64::NAN),
    })
}

/// Largest difference of `w` between a solve on `grid` and on its refinement,
/// sampled at the shared nodes.
pub fn refinement_difference(
    alpha: Complex64,
    options: SolveOptions,
    grid: &HalfLineGrid,
) -> Result<f64, SelfSimilarError> {
    let coarse = solve_fixed_point(alpha, options, grid)?;
    let fine = solve_fixed_point(alpha, options, &grid.refined()?)?;
    Ok(coarse
        .w
        .iter()
        .enumerate()
        .map(|(i, w)| (w - fine.w[2 * i]).norm())
        .fold(0.0, f64::max))
}

/// Max-norm residuals of `v' = ixv - x/Re U` and `U - xU' = v` with
/// numerical derivatives, over the nodes with `x > 0`.
pub fn residual(profile: &SelfSimilarProfile) -> (f64, f64) {
    let grid = &profile.grid;
    let x = grid.nodes();
    let dv = grid.derivative(&profile.v);
    let du = grid.derivative(&profile.u);
    let i = Complex64::new(0.0, 1.0);
    let mut res1: f64 = 0.0;
    let mut res2: f64 = 0.0;
    for k in 1..grid.len() {
        let r1 = dv[k] - (i * x[k] * profile.v[k] - x[k] / profile.u[k].re);
        let r2 = profile.u[k] - x[k] * du[k] - profile.v[k];
        res1 = res1.max(r1.norm());
        res2 = res2.max(r2.norm());
    }
    (res1, res2)
}

/// `U'(0⁺) = α + ∫_0^∞ w/z²`, the half-angle slope of the corner the two
/// filaments form at the collision height.
pub fn corner_slope(profile: &SelfSimilarProfile) -> Complex64 {
    profile.alpha + profile.tail_integral[0]
}

/// Largest residual of `iψ_t + ψ_σσ - 1/(2 Re ψ)` for the reconstructed
/// `ψ₁` at time `t` over the heights `sigmas`, using fourth order central
/// differences of step `h` in both `t` and `σ`.
pub fn reconstruction_residual(
    profile: &SelfSimilarProfile,
    t: f64,
    sigmas: impl IntoIterator<Item = f64>,
    h: f64,
) -> Result<f64, SelfSimilarError> {
    if !(t > 2.0 * h && h > 0.0) {
        return Err(SelfSimilarError::Domain(format!("t = {t}, h = {h}")));
    }
    let psi = |t: f64, s: f64| profile.psi1(t, s);
    let mut worst: f64 = 0.0;
    for s in sigmas {
        let dt = (-psi(t + 2.0 * h, s)? + 8.0 * psi(t + h, s)? - 8.0 * psi(t - h, s)? + psi(t - 2.0 * h, s)?)
            / (12.0 * h);
        let dss = (-psi(t, s + 2.0 * h)? + 16.0 * psi(t, s + h)? - 30.0 * psi(t, s)? + 16.0 * psi(t, s - h)?
            - psi(t, s - 2.0 * h)?)
            / (12.0 * h * h);
        let value = psi(t, s)?;
        let r = Complex64::new(0.0, 1.0) * dt + dss - 1.0 / (2.0 * value.re);
        worst = worst.max(r.norm());
    }
    Ok(worst)
}

/// Filament pair `ψ₁ = √t·U(σ/√(2t))`, `ψ₂ = -conj(ψ₁)` sampled on a
/// periodic grid.
pub fn reconstruct_filaments(
    profile: &SelfSimilarProfile,
    t: f64,
    grid: &Arc<PeriodicGrid>,
) -> Result<FilamentPair, SelfSimilarError> {
    if !(t > 0.0) {
        return Err(SelfSimilarError::Domain(format!("t = {t} must be positive")));
    }
    let psi1 = ComplexField::from_fn(grid, |s| t.sqrt() * profile.u_at(s / (2.0 * t).sqrt()));
    Ok(FilamentPair::symmetric(psi1, 1.0))
}

/// Header data of an exported profile.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ProfileSummary {
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub x_max: f64,
    pub n: usize,
    pub grid_scale: f64,
    pub iterations: usize,
    pub final_update: f64,
    pub contraction_ratio: f64,
    pub required_k1: f64,
    pub corner_slope_re: f64,
    pub corner_slope_im: f64,
    pub tail_bound: f64,
    pub e_norm: f64,
    pub residual_v: f64,
    pub residual_u: f64,
    pub proof_safe: bool,
}

/// Heights `0.25 ≤ |σ| ≤ 20` (both signs, step 0.05) used for the
/// reconstruction check; the corner at `σ = 0` is excluded.
pub fn reconstruction_heights() -> impl Iterator<Item = f64> {
    (0..=395).flat_map(|i| {
        let s = 0.25 + 0.05 * i as f64;
        [s, -s]
    })
}

/// Finite-difference step of the reconstruction check.
pub const RECONSTRUCTION_STEP: f64 = 1e-3;

/// Burn-in used when summarising contraction ratios.
pub const CONTRACTION_BURN_IN: usize = 3;

impl ProfileSummary {
    pub fn of(profile: &SelfSimilarProfile) -> Self {
        let (r1, r2) = residual(profile);
        let c = corner_slope(profile);
        Self {
            alpha_re: profile.alpha.re,
            alpha_im: profile.alpha.im,
            x_max: profile.grid.x_max(),
            n: profile.grid.len(),
            grid_scale: profile.grid.scale(),
            iterations: profile.iterations,
            final_update: profile.final_update,
            contraction_ratio: profile.contraction_ratio(CONTRACTION_BURN_IN),
            required_k1: profile.required_k1(CONTRACTION_BURN_IN),
            corner_slope_re: c.re,
            corner_slope_im: c.im,
            tail_bound: profile.tail_bound,
            e_norm: profile.e_norm(),
            residual_v: r1,
            residual_u: r2,
            proof_safe: profile.alpha.re >= proof_safe_alpha(),
        }
    }
}
