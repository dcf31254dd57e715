//! Collision detection, conservation monitoring, the near-collision bound
//! check and convergence-order fits.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{FilamentPair, Trajectory};
use crate::exact::free_gaussian;
use crate::grid::ComplexField;

/// Default threshold on `min |Ψ₁ - Ψ₂|`.
pub const PAIR_THRESHOLD: f64 = 0.05;
/// Default threshold on `min Re Ψ₁` (half the pair value, since the separation
/// equals `2 Re Ψ₁` for symmetric pairs).
pub const REDUCED_THRESHOLD: f64 = 0.025;

/// What a separation profile measures. Moduli vanish quadratically in their
/// square, so sub-grid refinement fits a parabola to the squared profile;
/// real parts are fitted directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Modulus,
    RealPart,
}

/// A state whose closeness to collision is read off a real profile on the
/// grid.
pub trait SeparationProfile {
    fn measure() -> Measure;
    fn profile(&self) -> Vec<f64>;
    fn nodes(&self) -> &[f64];
    fn spacing(&self) -> f64;
}

impl SeparationProfile for FilamentPair {
    fn measure() -> Measure {
        Measure::Modulus
    }

    fn profile(&self) -> Vec<f64> {
        self.psi1
            .values()
            .iter()
            .zip(self.psi2.values())
            .map(|(a, b)| (a - b).norm())
            .collect()
    }

    fn nodes(&self) -> &[f64] {
        self.grid().nodes()
    }

    fn spacing(&self) -> f64 {
        self.grid().spacing()
    }
}

impl SeparationProfile for ComplexField {
    fn measure() -> Measure {
        Measure::RealPart
    }

    fn profile(&self) -> Vec<f64> {
        self.values().iter().map(|z| z.re).collect()
    }

    fn nodes(&self) -> &[f64] {
        self.grid().nodes()
    }

    fn spacing(&self) -> f64 {
        self.grid().spacing()
    }
}

fn transform(v: f64, measure: Measure) -> f64 {
    match measure {
        Measure::Modulus => v * v,
        Measure::RealPart => v,
    }
}

fn untransform(v: f64, measure: Measure) -> f64 {
    match measure {
        Measure::Modulus => v.max(0.0).sqrt(),
        Measure::RealPart => v,
    }
}

/// Vertex of the parabola through `(-1, a), (0, b), (1, c)` as
/// `(offset, value)`, or `None` when it does not open upwards. The offset is
/// clamped to `[-1, 1]`.
fn parabola_vertex(a: f64, b: f64, c: f64) -> Option<(f64, f64)> {
    let curvature = a - 2.0 * b + c;
    if !(curvature > 0.0) {
        return None;
    }
    let offset = (0.5 * (a - c) / curvature).clamp(-1.0, 1.0);
    let value = b + 0.5 * (c - a) * offset + 0.5 * curvature * offset * offset;
    Some((offset, value))
}

/// Refined minimum of a periodic profile around node `j`.
fn refine_at(profile: &[f64], nodes: &[f64], dx: f64, j: usize, measure: Measure) -> (f64, f64) {
    let n = profile.len();
    let left = transform(profile[(j + n - 1) % n], measure);
    let mid = transform(profile[j], measure);
    let right = transform(profile[(j + 1) % n], measure);
    match parabola_vertex(left, mid, right) {
        Some((offset, value)) if value <= mid => (untransform(value, measure), nodes[j] + offset * dx),
        _ => (profile[j], nodes[j]),
    }
}

fn grid_argmin(profile: &[f64]) -> usize {
    let mut best = 0;
    for (j, &v) in profile.iter().enumerate() {
        if v < profile[best] {
            best = j;
        }
    }
    best
}

fn refined_min<S: SeparationProfile>(state: &S) -> (f64, f64) {
    let profile = state.profile();
    let j = grid_argmin(&profile);
    refine_at(&profile, state.nodes(), state.spacing(), j, S::measure())
}

/// `min_σ |Ψ₁ - Ψ₂|` and where it is attained, refined below the grid scale.
pub fn min_separation(pair: &FilamentPair) -> (f64, f64) {
    refined_min(pair)
}

/// `min_σ Re Ψ₁` and where it is attained (leftmost node on ties).
pub fn real_part_min(field: &ComplexField) -> (f64, f64) {
    refined_min(field)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionMethod {
    /// The separation was still decreasing at the last snapshot (typically
    /// because the run stopped on the separation guard); `t_star` is that
    /// snapshot's time.
    ThresholdCrossing,
    /// `t_star` is the vertex of the parabola through the three snapshots
    /// bracketing the first local minimum below the threshold.
    InterpolatedMinimum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionEvent {
    pub t_star: f64,
    /// Height of the deepest minimum at the collision snapshot.
    pub sigma_star: f64,
    /// The two heights `(σ₋, σ₊)` of a symmetric twin minimum.
    pub twin_sigmas: Option<(f64, f64)>,
    pub min_separation: f64,
    pub method: DetectionMethod,
    pub twin: bool,
    pub threshold: f64,
    pub measure: Measure,
    /// Index of the snapshot the event was read from.
    pub snapshot: usize,
}

/// Outcome of the time-series part of detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesDetection {
    pub t_star: f64,
    pub value: f64,
    pub index: usize,
    pub method: DetectionMethod,
}

/// First collision in a series of minima `values` sampled at increasing
/// `times`: the first sample below `threshold`, followed down to the next
/// local minimum. Larger thresholds never give a later `t_star`.
pub fn detect_in_series(
    times: &[f64],
    values: &[f64],
    threshold: f64,
    measure: Measure,
) -> Option<SeriesDetection> {
    let n = values.len().min(times.len());
    let first = (0..n).find(|&i| values[i] < threshold)?;
    let mut j = first;
    while j + 1 < n && values[j + 1] < values[j] {
        j += 1;
    }
    if j + 1 == n && j > first {
        return Some(SeriesDetection {
            t_star: times[j],
            value: values[j],
            index: j,
            method: DetectionMethod::ThresholdCrossing,
        });
    }
    if j == 0 || j + 1 >= n {
        return Some(SeriesDetection {
            t_star: times[j],
            value: values[j],
            index: j,
            method: DetectionMethod::InterpolatedMinimum,
        });
    }
    let (t0, t1, t2) = (times[j - 1], times[j], times[j + 1]);
    let (f0, f1, f2) = (
        transform(values[j - 1], measure),
        transform(values[j], measure),
        transform(values[j + 1], measure),
    );
    // quadratic through unevenly spaced samples (the last stride may be short)
    let d01 = (f1 - f0) / (t1 - t0);
    let d12 = (f2 - f1) / (t2 - t1);
    let second = (d12 - d01) / (t2 - t0);
    let (t_star, value) = if second > 0.0 {
        let t = (0.5 * (t0 + t1) - d01 / (2.0 * second)).clamp(t0, t2);
        let v = f0 + d01 * (t - t0) + second * (t - t0) * (t - t1);
        (t, untransform(v.min(f1), measure))
    } else {
        (t1, values[j])
    };
    Some(SeriesDetection {
        t_star,
        value,
        index: j,
        method: DetectionMethod::InterpolatedMinimum,
    })
}

/// Local minima of a periodic profile as `(value, σ)`, refined.
fn local_minima(profile: &[f64], nodes: &[f64], dx: f64, measure: Measure) -> Vec<(f64, f64)> {
    let n = profile.len();
    (0..n)
        .filter(|&j| {
            let l = profile[(j + n - 1) % n];
            let r = profile[(j + 1) % n];
            profile[j] < l && profile[j] <= r
        })
        .map(|j| refine_at(profile, nodes, dx, j, measure))
        .collect()
}

/// Twin minima `(σ₋, σ₊)`: the deepest local minimum and another one at the
/// mirrored height (within two grid spacings) whose depth is within a factor
/// of two.
fn find_twin(profile: &[f64], nodes: &[f64], dx: f64, measure: Measure) -> Option<(f64, f64)> {
    let minima = local_minima(profile, nodes, dx, measure);
    let &(m1, s1) = minima
        .iter()
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())?;
    minima
        .iter()
        .filter(|&&(_, s2)| (s1 - s2).abs() >= 2.0 * dx && (s1 + s2).abs() < 2.0 * dx)
        .find(|&&(m2, _)| m2.max(m1) <= 2.0 * m2.min(m1).max(0.0) + f64::MIN_POSITIVE)
        .map(|&(_, s2)| if s1 < s2 { (s1, s2) } else { (s2, s1) })
}

/// First collision of a trajectory: the minimum of the separation profile
/// is tracked over snapshots and handed to [`detect_in_series`]; the snapshot
/// at the detected index supplies the height and the twin test.
pub fn detect_collision<S: SeparationProfile>(
    traj: &Trajectory<S>,
    threshold: f64,
) -> Option<CollisionEvent> {
    let times: Vec<f64> = traj.snapshots.iter().map(|s| s.time).collect();
    let minima: Vec<(f64, f64)> = traj.snapshots.iter().map(|s| refined_min(&s.state)).collect();
    let values: Vec<f64> = minima.iter().map(|m| m.0).collect();
    let found = detect_in_series(&times, &values, threshold, S::measure())?;
    let state = &traj.snapshots[found.index].state;
    let twin_sigmas = find_twin(&state.profile(), state.nodes(), state.spacing(), S::measure());
    Some(CollisionEvent {
        t_star: found.t_star,
        sigma_star: minima[found.index].1,
        twin_sigmas,
        min_separation: found.value.max(0.0),
        method: found.method,
        twin: twin_sigmas.is_some(),
        threshold,
        measure: S::measure(),
        snapshot: found.index,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    /// `‖Ψ₁ - Ψ₂ - 2‖` per snapshot.
    pub series: Vec<f64>,
    pub max_relative_drift: f64,
}

/// `‖Ψ₁ - Ψ₂ - 2‖` over a pair trajectory. For opposite cores the difference
/// evolves by the free flow, which the scheme reproduces exactly.
pub fn conserved_difference_norm(traj: &Trajectory<FilamentPair>) -> ConservationReport {
    let series: Vec<f64> = traj
        .snapshots
        .iter()
        .map(|s| s.state.difference().map(|d| d - 2.0).l2_norm())
        .collect();
    let reference = series.first().copied().unwrap_or(0.0);
    let max_relative_drift = series
        .iter()
        .map(|&v| {
            let diff = (v - reference).abs();
            if reference > 0.0 {
                diff / reference
            } else {
                diff
            }
        })
        .fold(0.0, f64::max);
    ConservationReport {
        series,
        max_relative_drift,
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
}

/// Least-squares slope of `log(error)` against `log(τ)`.
pub fn convergence_order(errors: &[(f64, f64)]) -> Result<f64, FitError> {
    if errors.len() < 3 {
        return Err(FitError::DegenerateFit(format!("{} points, need 3", errors.len())));
    }
    for w in errors.windows(2) {
        if !(w[1].0 < w[0].0) {
            return Err(FitError::DegenerateFit("tau must decrease".into()));
        }
        if !(w[1].1 < w[0].1) {
            return Err(FitError::DegenerateFit(format!(
                "error does not decrease: {:.3e} then {:.3e}",
                w[0].1, w[1].1
            )));
        }
    }
    if errors.iter().any(|&(t, e)| !(t > 0.0 && e > 0.0)) {
        return Err(FitError::DegenerateFit("non-positive tau or error".into()));
    }
    let pts: Vec<(f64, f64)> = errors.iter().map(|&(t, e)| (t.ln(), e.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Smallest `C` with `n(t) ≤ C(1 + t)` over the samples `(t, n)`.
pub fn affine_growth_constant(samples: &[(f64, f64)]) -> f64 {
    samples
        .iter()
        .map(|&(t, n)| n / (1.0 + t.abs()))
        .fold(0.0, f64::max)
}

/// Closed rectangle in `(s, σ)` sampled by a uniform lattice including the
/// corners.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub s: (f64, f64),
    pub sigma: (f64, f64),
    pub s_points: usize,
    pub sigma_points: usize,
}

fn lattice(range: (f64, f64), points: usize) -> impl Iterator<Item = f64> {
    let step = if points > 1 {
        (range.1 - range.0) / (points - 1) as f64
    } else {
        0.0
    };
    (0..points.max(1)).map(move |i| range.0 + i as f64 * step)
}

/// Empirical constant of `|1/(1 - f(s,σ))| ≤ C max{1, 1/(σ² + |1-s|)}` over
/// a lattice, with `f(s,·) = e^{is∂²}G`. The singular point `(1, 0)` is
/// skipped if it is a lattice point.
pub fn bound_check(region: &Region) -> f64 {
    let mut worst: f64 = 0.0;
    for s in lattice(region.s, region.s_points) {
        for sigma in lattice(region.sigma, region.sigma_points) {
            let distance = sigma * sigma + (1.0 - s).abs();
            if distance == 0.0 {
                continue;
            }
            let lhs = 1.0 / (Complex64::new(1.0, 0.0) - free_gaussian(s, sigma)).norm();
            worst = worst.max(lhs / (1.0f64).max(1.0 / distance));
        }
    }
    worst
}
