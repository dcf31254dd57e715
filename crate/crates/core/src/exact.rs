//! Closed-form solutions and constructed initial data.
//!
//! The Gaussian `G(σ) = e^{-σ²/(1-4i)}/√(1-4i)` evolves under the free
//! Schrödinger flow `e^{it∂²}` into
//! `f(t, σ) = e^{-σ²/(1-4i(1-t))}/√(1-4i(1-t))`, which equals `1` exactly at
//! `(t, σ) = (1, 0)`. For opposite core parameters the pair started from
//! `(1-G, -1+G)` therefore has the free difference `2(1-f)`, vanishing only
//! at that point, while the sum carries the Duhamel term `D`.
//!
//! All square roots are principal; `1-4i(1-t)` has real part `1`, so the
//! branch never switches.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::FilamentPair;
use crate::grid::{apply_multiplier, ComplexField, FourierMultiplier, PeriodicGrid};
use crate::quadrature::{composite_rule, QuadratureRule};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error("Duhamel quadrature unresolved: refinement changed D by {difference:.3e} (tolerance {tolerance:.1e})")]
    QuadratureUnresolved { difference: f64, tolerance: f64 },
    #[error("parameter out of range: {0}")]
    Domain(String),
    #[error("initial datum singular at sigma = {sigma}: 1 + v vanishes")]
    SingularDatum { sigma: f64 },
}

fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

/// `G(σ) = e^{-σ²/(1-4i)}/√(1-4i)`.
pub fn gaussian_g(sigma: f64) -> Complex64 {
    free_gaussian(0.0, sigma)
}

/// `e^{it∂²_σ}G` in closed form.
pub fn free_gaussian(t: f64, sigma: f64) -> Complex64 {
    let a = Complex64::new(1.0, -4.0 * (1.0 - t));
    (-(sigma * sigma) / a).exp() / a.sqrt()
}

/// `Ψ₁ - Ψ₂ = 2(1 - e^{it∂²}G)` for the opposite-core collision datum.
pub fn mild_difference(t: f64, sigma: f64) -> Complex64 {
    2.0 * (1.0 - free_gaussian(t, sigma))
}

pub fn gaussian_field(grid: &Arc<PeriodicGrid>) -> ComplexField {
    ComplexField::from_fn(grid, gaussian_g)
}

pub fn free_gaussian_field(grid: &Arc<PeriodicGrid>, t: f64) -> ComplexField {
    ComplexField::from_fn(grid, |s| free_gaussian(t, s))
}

/// Point vortex pair `z₁ = 1 - it/2`, `z₂ = -1 - it/2`.
pub fn translating_pair(t: f64) -> (Complex64, Complex64) {
    let drift = Complex64::new(0.0, -t / 2.0);
    (1.0 + drift, -1.0 + drift)
}

/// `(1-G, -1+G)` with the given core parameters.
pub fn gaussian_datum(grid: &Arc<PeriodicGrid>, alpha1: f64, alpha2: f64) -> FilamentPair {
    let g = gaussian_field(grid);
    FilamentPair::new(g.map(|z| 1.0 - z), g.map(|z| -1.0 + z), alpha1, alpha2)
}

/// `(c-G, -c+conj(G))`, which satisfies `Ψ₂ = -conj(Ψ₁)`.
pub fn symmetric_gaussian_datum(grid: &Arc<PeriodicGrid>, offset: f64, alpha: f64) -> FilamentPair {
    FilamentPair::symmetric(reduced_gaussian_datum(grid, offset), alpha)
}

/// `Ψ₁(0) = c - G` for the reduced equation.
pub fn reduced_gaussian_datum(grid: &Arc<PeriodicGrid>, offset: f64) -> ComplexField {
    gaussian_field(grid).map(|z| offset - z)
}

/// Opposite-core datum `(1-G+u₀, -1+G+u₀)`. The shift cancels in the
/// difference, so the collision time and height are those of `u₀ = 0`.
pub fn shifted_collision_datum(u0: &ComplexField) -> FilamentPair {
    let g = gaussian_field(u0.grid());
    FilamentPair::new(
        g.zip_with(u0, |g, u| 1.0 - g + u),
        g.zip_with(u0, |g, u| -1.0 + g + u),
        1.0,
        -1.0,
    )
}

/// Discretisation of the `s`-integral defining `D`.
#[derive(Debug, Clone)]
pub struct MildSolutionParams {
    pub grid: Arc<PeriodicGrid>,
    pub quadrature_steps_per_unit_time: usize,
    pub rule: QuadratureRule,
    /// When set, `D` is recomputed with twice the panels and the two results
    /// must agree to this tolerance in the grid L² norm.
    pub refinement_tolerance: Option<f64>,
}

/// Default panel density for the `s`-integral.
pub const DEFAULT_QUADRATURE_STEPS: usize = 2000;

impl MildSolutionParams {
    /// Composite midpoint rule with [`DEFAULT_QUADRATURE_STEPS`] panels per
    /// unit time and one refinement check at `1e-4`.
    pub fn new(grid: &Arc<PeriodicGrid>) -> Self {
        Self {
            grid: Arc::clone(grid),
            quadrature_steps_per_unit_time: DEFAULT_QUADRATURE_STEPS,
            rule: QuadratureRule::Midpoint,
            refinement_tolerance: Some(1e-4),
        }
    }

    pub fn with_rule(mut self, rule: QuadratureRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.quadrature_steps_per_unit_time = steps;
        self
    }

    pub fn with_refinement(mut self, tolerance: Option<f64>) -> Self {
        self.refinement_tolerance = tolerance;
        self
    }
}

/// Pointwise integrand `1/(1 - conj f(s, σ)) - 1 = conj f/(1 - conj f)`.
fn duhamel_integrand(grid: &PeriodicGrid, s: f64) -> Vec<Complex64> {
    grid.nodes()
        .iter()
        .map(|&x| {
            let fc = free_gaussian(s, x).conj();
            fc / (1.0 - fc)
        })
        .collect()
}

fn duhamel_with_panels(t: f64, grid: &Arc<PeriodicGrid>, rule: QuadratureRule, panels: usize) -> ComplexField {
    duhamel_increment(0.0, t, grid, rule, panels)
}

/// `i ∫_a^b e^{i(b-s)∂²} h(s) ds` for the Duhamel integrand `h`.
fn duhamel_increment(a: f64, b: f64, grid: &Arc<PeriodicGrid>, rule: QuadratureRule, panels: usize) -> ComplexField {
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.num_nodes()];
    let mut scratch = vec![Complex64::new(0.0, 0.0); grid.scratch_len()];
    // fixed node order, so repeated evaluations are bitwise identical
    for (s, w) in composite_rule(rule, a, b, panels) {
        let mut h = duhamel_integrand(grid, s);
        FourierMultiplier::free_schrodinger(grid, b - s, 1.0).apply_in_place(&mut h, &mut scratch);
        for (a, v) in acc.iter_mut().zip(&h) {
            *a += v * w;
        }
    }
    for a in acc.iter_mut() {
        *a *= i();
    }
    ComplexField::new(Arc::clone(grid), acc)
}

/// `D` at `t_n = n·step` for `n = 0..=count`, marching
/// `D(t_{n+1}) = e^{i step ∂²} D(t_n) + i ∫_{t_n}^{t_{n+1}} …`. With
/// `step·quadrature_steps_per_unit_time` integral the panels coincide with
/// those of [`duhamel_d`].
pub fn duhamel_series(step: f64, count: usize, params: &MildSolutionParams) -> Result<Vec<ComplexField>, ExactError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(ExactError::Domain(format!("step = {step}")));
    }
    if params.quadrature_steps_per_unit_time == 0 {
        return Err(ExactError::Domain("quadrature_steps_per_unit_time = 0".into()));
    }
    let grid = &params.grid;
    let panels = ((step * params.quadrature_steps_per_unit_time as f64).round() as usize).max(1);
    let propagate = FourierMultiplier::free_schrodinger(grid, step, 1.0);
    let mut scratch = vec![Complex64::new(0.0, 0.0); grid.scratch_len()];
    let mut out = Vec::with_capacity(count + 1);
    let mut current = ComplexField::zeros(grid);
    out.push(current.clone());
    for n in 0..count {
        let (a, b) = (n as f64 * step, (n + 1) as f64 * step);
        propagate.apply_in_place(current.values_mut(), &mut scratch);
        let inc = duhamel_increment(a, b, grid, params.rule, panels);
        current = current.zip_with(&inc, |x, y| x + y);
        out.push(current.clone());
    }
    Ok(out)
}

/// `D(t, ·) = i ∫₀ᵗ e^{i(t-s)∂²}(1/(1 - conj(e^{is∂²}G)) - 1) ds` on the grid.
///
/// The integrand behaves like `1/(σ² + |1-s|)` near `(s, σ) = (1, 0)`. The
/// rules used here never sample a panel endpoint, so `s = 1` is never hit
/// when it lies on a panel boundary. Negative `t` integrates from `0` down to
/// `t`.
pub fn duhamel_d(t: f64, params: &MildSolutionParams) -> Result<ComplexField, ExactError> {
    if !t.is_finite() {
        return Err(ExactError::Domain(format!("t = {t}")));
    }
    if params.quadrature_steps_per_unit_time == 0 {
        return Err(ExactError::Domain("quadrature_steps_per_unit_time = 0".into()));
    }
    let grid = &params.grid;
    let panels = (t.abs() * params.quadrature_steps_per_unit_time as f64).ceil() as usize;
    let d = duhamel_with_panels(t, grid, params.rule, panels);
    if let Some(tol) = params.refinement_tolerance {
        let fine = duhamel_with_panels(t, grid, params.rule, 2 * panels);
        let difference = fine.zip_with(&d, |a, b| a - b).l2_norm();
        if !(difference <= tol) {
            return Err(ExactError::QuadratureUnresolved {
                difference,
                tolerance: tol,
            });
        }
    }
    Ok(d)
}

/// The mild solution with data `(1-G, -1+G)` and `α₁ = -α₂ = 1`:
/// `Ψ₁,₂ = -it/2 ± e^{it∂²}(1-G) - D/2`.
pub fn mild_pair(t: f64, params: &MildSolutionParams) -> Result<FilamentPair, ExactError> {
    let d = duhamel_d(t, params)?;
    Ok(mild_pair_from_duhamel(t, &d))
}

/// Assembles the mild pair from a precomputed `D(t)`.
pub fn mild_pair_from_duhamel(t: f64, d: &ComplexField) -> FilamentPair {
    let grid = d.grid();
    let drift = Complex64::new(0.0, -t / 2.0);
    let free = free_gaussian_field(grid, t).map(|f| 1.0 - f);
    let psi1 = free.zip_with(d, |e, d| drift + e - 0.5 * d);
    let psi2 = free.zip_with(d, |e, d| drift - e - 0.5 * d);
    let mut pair = FilamentPair::new(psi1, psi2, 1.0, -1.0);
    pair.time = t;
    pair
}

/// Symbol of the smoothing operator `B₀`:
/// `-1/((1+ξ²)·√(ξ²/(1+ξ²) + 1))`.
pub fn b0_symbol(xi: f64) -> f64 {
    let q = 1.0 + xi * xi;
    -1.0 / (q * (xi * xi / q + 1.0).sqrt())
}

/// Direction of the quadratic phase of the dispersive datum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chirp {
    /// `e^{+iσ²}`. Under `e^{it∂²}` this phase focuses at `t = -1/4`, so the
    /// forward evolution disperses it.
    Defocusing,
    /// `e^{-iσ²}`, which focuses at `t = +1/4` under the free flow.
    Focusing,
}

impl Chirp {
    fn sign(self) -> f64 {
        match self {
            Chirp::Defocusing => 1.0,
            Chirp::Focusing => -1.0,
        }
    }
}

impl std::str::FromStr for Chirp {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "defocusing" | "plus" => Ok(Chirp::Defocusing),
            "focusing" | "minus" => Ok(Chirp::Focusing),
            other => Err(format!("unknown chirp '{other}' (expected focusing or defocusing)")),
        }
    }
}

/// Dispersive blow-up datum
/// `v₀(σ) = e^{±iσ²}/(1+σ²)^m + B₀(cos(σ²)/(1+σ²)^m)` for `1/4 < m ≤ 1/2`.
/// The two chirps give complex conjugate data.
pub fn bpss_datum(m: f64, chirp: Chirp, grid: &Arc<PeriodicGrid>) -> Result<ComplexField, ExactError> {
    if !(m > 0.25 && m <= 0.5) {
        return Err(ExactError::Domain(format!("m = {m} must lie in (1/4, 1/2]")));
    }
    let weight = |s: f64| (1.0 + s * s).powf(-m);
    let sign = chirp.sign();
    let first = ComplexField::from_fn(grid, |s| Complex64::from_polar(weight(s), sign * s * s));
    let inner = ComplexField::from_fn(grid, |s| Complex64::new((s * s).cos() * weight(s), 0.0));
    let second = apply_multiplier(&inner, |xi| Complex64::new(b0_symbol(xi), 0.0));
    Ok(first.zip_with(&second, |a, b| a + b))
}

/// `Ψ₁(0, σ) = 1/(1 + v₀(σ))` built from [`bpss_datum`].
pub fn bpss_initial_psi(m: f64, chirp: Chirp, grid: &Arc<PeriodicGrid>) -> Result<ComplexField, ExactError> {
    let v = bpss_datum(m, chirp, grid)?;
    for (&s, z) in grid.nodes().iter().zip(v.values()) {
        if (1.0 + z).norm() < 1e-12 {
            return Err(ExactError::SingularDatum { sigma: s });
        }
    }
    Ok(v.map(|z| 1.0 / (1.0 + z)))
}

/// Serializable summary of how `D` was computed, for run manifests.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct QuadratureSummary {
    pub rule: QuadratureRule,
    pub steps_per_unit_time: usize,
    pub refinement_tolerance: Option<f64>,
}

impl From<&MildSolutionParams> for QuadratureSummary {
    fn from(p: &MildSolutionParams) -> Self {
        Self {
            rule: p.rule,
            steps_per_unit_time: p.quadrature_steps_per_unit_time,
            refinement_tolerance: p.refinement_tolerance,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_at_zero() {
        // principal root of 1-4i is 1.600485... - 1.249621...i
        let r = Complex64::new(1.0, -4.0).sqrt();
        assert!((r * r - Complex64::new(1.0, -4.0)).norm() < 1e-14);
        assert!(r.re > 0.0);
        let g0 = gaussian_g(0.0);
        let expected = 1.0 / r;
        assert!((g0 - expected).norm() < 1e-15);
        assert!((g0.re - 0.38817).abs() < 1e-5 && (g0.im - 0.30308).abs() < 1e-5);
    }

    #[test]
    fn gaussian_is_even_decaying_and_maximal_at_zero() {
        assert_eq!(gaussian_g(1.3), gaussian_g(-1.3));
        assert!(gaussian_g(200.0).norm() < 1e-300);
        let g0 = gaussian_g(0.0).norm();
        for k in 0..100 {
            assert!(gaussian_g(0.1 * k as f64).norm() <= g0 + 1e-16);
        }
    }

    #[test]
    fn free_gaussian_special_times() {
        for s in [-2.0, 0.0, 0.3, 1.7] {
            assert!((free_gaussian(1.0, s) - (-s * s as f64).exp()).norm() < 1e-15);
            assert_eq!(free_gaussian(0.0, s), gaussian_g(s));
        }
        assert_eq!(free_gaussian(1.0, 0.0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn mild_difference_vanishes_only_at_collision() {
        assert!(mild_difference(1.0, 0.0).norm() <= 1e-14);
        for s in [0.5, -0.2, 2.0] {
            let d = mild_difference(1.0, s);
            assert!(d.im.abs() < 1e-15 && d.re > 0.0);
            assert!((d.re - 2.0 * (1.0 - (-s * s as f64).exp())).abs() < 1e-15);
            assert_eq!(mild_difference(0.0, s), 2.0 * (1.0 - gaussian_g(s)));
        }
        for t in [0.9, 0.99, 1.01, 1.5] {
            assert!(mild_difference(t, 0.0).norm() > 1e-3);
        }
    }

    #[test]
    fn translating_pair_formula() {
        assert_eq!(translating_pair(0.0), (Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)));
        assert_eq!(translating_pair(2.0), (Complex64::new(1.0, -1.0), Complex64::new(-1.0, -1.0)));
        for t in [0.3, 5.0, -1.0] {
            let (a, b) = translating_pair(t);
            assert_eq!(a - b, Complex64::new(2.0, 0.0));
        }
    }

    #[test]
    fn b0_symbol_and_bpss_first_term() {
        assert_eq!(b0_symbol(0.0), -1.0);
        let grid = PeriodicGrid::new(10.0, 256).unwrap();
        let c = ComplexField::constant(&grid, Complex64::new(0.4, 0.1));
        let out = apply_multiplier(&c, |xi| Complex64::new(b0_symbol(xi), 0.0));
        assert!(out.values().iter().all(|z| (z + Complex64::new(0.4, 0.1)).norm() < 1e-14));
        let first = |m: f64, s: f64| Complex64::from_polar((1.0 + s * s).powf(-m), s * s);
        assert_eq!(first(0.5, 0.0), Complex64::new(1.0, 0.0));
        assert!((first(0.5, 10.0).norm() - 101f64.powf(-0.5)).abs() < 1e-15);
        assert!((first(0.5, 10.0).norm() - 0.0995).abs() < 1e-4);
    }

    #[test]
    fn bpss_rejects_out_of_range_m() {
        let grid = PeriodicGrid::new(10.0, 64).unwrap();
        assert!(matches!(bpss_datum(0.25, Chirp::Focusing, &grid), Err(ExactError::Domain(_))));
        assert!(matches!(bpss_datum(0.6, Chirp::Focusing, &grid), Err(ExactError::Domain(_))));
        assert!(bpss_initial_psi(0.5, Chirp::Defocusing, &grid).unwrap().is_finite());
    }

    #[test]
    fn marching_matches_direct_quadrature() {
        let grid = PeriodicGrid::new(10.0, 128).unwrap();
        let params = MildSolutionParams::new(&grid).with_steps(400).with_refinement(None);
        let series = duhamel_series(0.05, 10, &params).unwrap();
        let direct = duhamel_d(0.5, &params).unwrap();
        let diff = series[10].zip_with(&direct, |a, b| a - b).max_abs();
        assert!(diff < 1e-12, "{diff:e}");
        assert_eq!(series[0].max_abs(), 0.0);
    }

    #[test]
    fn chirps_are_conjugate() {
        let grid = PeriodicGrid::new(10.0, 128).unwrap();
        let plus = bpss_datum(0.4, Chirp::Defocusing, &grid).unwrap();
        let minus = bpss_datum(0.4, Chirp::Focusing, &grid).unwrap();
        for (a, b) in plus.values().iter().zip(minus.values()) {
            assert!((a.conj() - b).norm() < 1e-14);
        }
        assert_eq!("focusing".parse::<Chirp>(), Ok(Chirp::Focusing));
    }

    #[test]
    fn shifted_datum_keeps_the_difference() {
        let grid = PeriodicGrid::new(10.0, 128).unwrap();
        let zero = ComplexField::zeros(&grid);
        assert_eq!(shifted_collision_datum(&zero), gaussian_datum(&grid, 1.0, -1.0));
        let u0 = ComplexField::from_fn(&grid, |s| Complex64::new((-s * s).exp(), 0.3 * s.sin()));
        let pair = shifted_collision_datum(&u0);
        let g = gaussian_field(&grid);
        for (d, g) in pair.difference().values().iter().zip(g.values()) {
            assert!((d - 2.0 * (1.0 - g)).norm() < 1e-15);
        }
    }

    #[test]
    fn duhamel_vanishes_at_time_zero() {
        let grid = PeriodicGrid::new(10.0, 64).unwrap();
        let d = duhamel_d(0.0, &MildSolutionParams::new(&grid)).unwrap();
        assert_eq!(d.max_abs(), 0.0);
        let pair = mild_pair(0.0, &MildSolutionParams::new(&grid)).unwrap();
        let datum = gaussian_datum(&grid, 1.0, -1.0);
        assert!(pair.psi1.zip_with(&datum.psi1, |a, b| a - b).max_abs() < 1e-15);
        assert!(pair.psi2.zip_with(&datum.psi2, |a, b| a - b).max_abs() < 1e-15);
    }

    #[test]
    fn mild_pair_difference_and_sum() {
        let grid = PeriodicGrid::new(10.0, 128).unwrap();
        let params = MildSolutionParams::new(&grid).with_steps(200).with_refinement(None);
        let t = 0.5;
        let d = duhamel_d(t, &params).unwrap();
        let pair = mild_pair_from_duhamel(t, &d);
        for (&s, z) in grid.nodes().iter().zip(pair.difference().values()) {
            assert!((z - mild_difference(t, s)).norm() < 1e-14);
        }
        let expected = d.map(|d| Complex64::new(0.0, -t) - d);
        assert!(pair.sum().zip_with(&expected, |a, b| a - b).max_abs() < 1e-14);
    }
}
