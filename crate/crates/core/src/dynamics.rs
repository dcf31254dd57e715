//! Split-step time integration of a filament pair with opposite circulations
//! `Γ₁ = -Γ₂ = 1`,
//!
//! ```text
//! i∂_tΨ₁ + α₁∂²_σΨ₁ - (Ψ₁-Ψ₂)/|Ψ₁-Ψ₂|² = 0
//! i∂_tΨ₂ - α₂∂²_σΨ₂ - (Ψ₁-Ψ₂)/|Ψ₁-Ψ₂|² = 0
//! ```
//!
//! and of the symmetric reduction `Ψ₂ = -conj(Ψ₁)`,
//! `i∂_tΨ + ∂²_σΨ - 1/(2 Re Ψ) = 0`.
//!
//! Both the dispersive part and the interaction part have exact flows, so a
//! step is a composition of a diagonal Fourier multiplier and a pointwise
//! update. Lie steps apply the interaction first and the dispersion second;
//! Strang steps wrap a full dispersive step between two half interaction
//! steps.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{ComplexField, FourierMultiplier, PeriodicGrid};

/// Early-stop separation used when none is configured.
pub const DEFAULT_STOP_SEPARATION: f64 = 1e-3;
/// Upper bound on the number of snapshots kept by the default stride.
pub const DEFAULT_MAX_SNAPSHOTS: usize = 2000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("filament separation {separation:.3e} at sigma = {sigma:.4} fell below {threshold:.3e}")]
    SeparationUnderflow {
        separation: f64,
        sigma: f64,
        threshold: f64,
    },
    #[error(transparent)]
    Cfl(#[from] CflViolation),
    #[error("invalid splitting configuration: {0}")]
    Config(String),
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
#[error("CFL number tau*K^2/L^2 = {cfl_number:.4} is not below pi (tau = {tau:e})")]
pub struct CflViolation {
    pub tau: f64,
    pub cfl_number: f64,
}

/// Returns the CFL number `τK²L⁻²` when it is below `π`.
pub fn check_cfl(grid: &PeriodicGrid, tau: f64) -> Result<f64, CflViolation> {
    let cfl_number = grid.cfl_number(tau);
    if tau.is_finite() && tau > 0.0 && cfl_number < std::f64::consts::PI {
        Ok(cfl_number)
    } else {
        Err(CflViolation { tau, cfl_number })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilamentPair {
    pub psi1: ComplexField,
    pub psi2: ComplexField,
    pub alpha1: f64,
    pub alpha2: f64,
    pub time: f64,
}

impl FilamentPair {
    pub fn new(psi1: ComplexField, psi2: ComplexField, alpha1: f64, alpha2: f64) -> Self {
        assert!(
            **psi1.grid() == **psi2.grid(),
            "both filaments must share one grid"
        );
        Self {
            psi1,
            psi2,
            alpha1,
            alpha2,
            time: 0.0,
        }
    }

    pub fn grid(&self) -> &Arc<PeriodicGrid> {
        self.psi1.grid()
    }

    /// `Ψ₁ - Ψ₂`.
    pub fn difference(&self) -> ComplexField {
        self.psi1.zip_with(&self.psi2, |a, b| a - b)
    }

    /// `Ψ₁ + Ψ₂`.
    pub fn sum(&self) -> ComplexField {
        self.psi1.zip_with(&self.psi2, |a, b| a + b)
    }

    /// Pair built from `Ψ₁` under the symmetry `Ψ₂ = -conj(Ψ₁)`.
    pub fn symmetric(psi1: ComplexField, alpha: f64) -> Self {
        let psi2 = psi1.map(|z| -z.conj());
        Self::new(psi1, psi2, alpha, alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Hash)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Lie,
    Strang,
}

impl std::str::FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lie" => Ok(Self::Lie),
            "strang" => Ok(Self::Strang),
            other => Err(format!("unknown splitting scheme '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplittingConfig {
    pub scheme: Scheme,
    pub tau: f64,
    pub t_end: f64,
    pub snapshot_stride: usize,
    pub stop_separation: f64,
}

impl SplittingConfig {
    /// Config with the default stop separation and a stride keeping at most
    /// [`DEFAULT_MAX_SNAPSHOTS`] snapshots.
    pub fn new(scheme: Scheme, tau: f64, t_end: f64) -> Self {
        let mut config = Self {
            scheme,
            tau,
            t_end,
            snapshot_stride: 1,
            stop_separation: DEFAULT_STOP_SEPARATION,
        };
        let steps = config.num_steps();
        config.snapshot_stride = steps.div_ceil(DEFAULT_MAX_SNAPSHOTS - 1).max(1);
        config
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride;
        self
    }

    pub fn with_stop_separation(mut self, stop: f64) -> Self {
        self.stop_separation = stop;
        self
    }

    /// Number of steps of size `tau` needed to reach `t_end`.
    pub fn num_steps(&self) -> usize {
        if self.t_end <= 0.0 {
            return 0;
        }
        (self.t_end / self.tau - 1e-9).ceil().max(0.0) as usize
    }

    pub fn validate(&self, grid: &PeriodicGrid) -> Result<f64, DynamicsError> {
        if self.snapshot_stride == 0 {
            return Err(DynamicsError::Config("snapshot_stride must be >= 1".into()));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(DynamicsError::Config(format!("t_end = {}", self.t_end)));
        }
        if !(self.stop_separation >= 0.0) {
            return Err(DynamicsError::Config(format!(
                "stop_separation = {}",
                self.stop_separation
            )));
        }
        Ok(check_cfl(grid, self.tau)?)
    }
}

fn argmin(values: impl Iterator<Item = f64>) -> (f64, usize) {
    values
        .enumerate()
        .fold((f64::INFINITY, 0), |(best, at), (j, d)| {
            if d < best {
                (d, j)
            } else {
                (best, at)
            }
        })
}

fn nonlinear_in_place(
    psi1: &mut [Complex64],
    psi2: &mut [Complex64],
    nodes: &[f64],
    t: f64,
    stop: f64,
) -> Result<(), DynamicsError> {
    let (sep, j) = argmin(psi1.iter().zip(psi2.iter()).map(|(a, b)| (a - b).norm()));
    if !(sep >= stop) || sep == 0.0 {
        return Err(DynamicsError::SeparationUnderflow {
            separation: sep,
            sigma: nodes[j],
            threshold: stop,
        });
    }
    let minus_it = Complex64::new(0.0, -t);
    for (a, b) in psi1.iter_mut().zip(psi2.iter_mut()) {
        let d = *a - *b;
        let inc = minus_it * d / d.norm_sqr();
        *a += inc;
        *b += inc;
    }
    Ok(())
}

fn reduced_nonlinear_in_place(
    psi: &mut [Complex64],
    nodes: &[f64],
    t: f64,
    stop: f64,
) -> Result<(), DynamicsError> {
    let (sep, j) = argmin(psi.iter().map(|z| 2.0 * z.re));
    // a non-positive real part means the filaments have already crossed
    if !(sep >= stop) || sep <= 0.0 {
        return Err(DynamicsError::SeparationUnderflow {
            separation: sep,
            sigma: nodes[j],
            threshold: stop,
        });
    }
    for z in psi.iter_mut() {
        z.im -= t / (2.0 * z.re);
    }
    Ok(())
}

/// Exact flow of the interaction part over time `t`: both filaments receive
/// the increment `-i t (Ψ₁-Ψ₂)/|Ψ₁-Ψ₂|²`, so their difference is untouched.
pub fn nonlinear_flow(
    pair: &FilamentPair,
    t: f64,
    stop_separation: f64,
) -> Result<FilamentPair, DynamicsError> {
    let mut out = pair.clone();
    let nodes = pair.grid().nodes().to_vec();
    nonlinear_in_place(
        out.psi1.values_mut(),
        out.psi2.values_mut(),
        &nodes,
        t,
        stop_separation,
    )?;
    Ok(out)
}

/// Exact flow of `i∂_tΨ = 1/(2 Re Ψ)`: `Ψ ← Ψ - i t/(2 Re Ψ)`.
pub fn reduced_nonlinear_flow(
    psi1: &ComplexField,
    t: f64,
    stop_separation: f64,
) -> Result<ComplexField, DynamicsError> {
    let mut out = psi1.clone();
    let nodes = psi1.grid().nodes().to_vec();
    reduced_nonlinear_in_place(out.values_mut(), &nodes, t, stop_separation)?;
    Ok(out)
}

/// Advances a state by one splitting step in place.
pub trait Stepper {
    type State: Clone;

    fn step(&mut self, state: &mut Self::State) -> Result<(), DynamicsError>;

    fn tau(&self) -> f64;
}

/// Splitting stepper for the two-filament system with cached multipliers.
#[derive(Debug, Clone)]
pub struct PairStepper {
    scheme: Scheme,
    tau: f64,
    stop: f64,
    linear1: FourierMultiplier,
    linear2: FourierMultiplier,
    nodes: Vec<f64>,
    scratch: Vec<Complex64>,
}

impl PairStepper {
    /// Filament 1 disperses with sign `+α₁`, filament 2 with `-α₂`.
    pub fn new(
        grid: &Arc<PeriodicGrid>,
        alpha1: f64,
        alpha2: f64,
        scheme: Scheme,
        tau: f64,
        stop_separation: f64,
    ) -> Self {
        let linear1 = FourierMultiplier::free_schrodinger(grid, tau, alpha1);
        let linear2 = FourierMultiplier::free_schrodinger(grid, tau, -alpha2);
        let scratch = vec![Complex64::new(0.0, 0.0); linear1.scratch_len()];
        Self {
            scheme,
            tau,
            stop: stop_separation,
            linear1,
            linear2,
            nodes: grid.nodes().to_vec(),
            scratch,
        }
    }

    pub fn for_pair(pair: &FilamentPair, config: &SplittingConfig) -> Self {
        Self::new(
            pair.grid(),
            pair.alpha1,
            pair.alpha2,
            config.scheme,
            config.tau,
            config.stop_separation,
        )
    }

    fn linear(&mut self, pair: &mut FilamentPair) {
        self.linear1
            .apply_in_place(pair.psi1.values_mut(), &mut self.scratch);
        self.linear2
            .apply_in_place(pair.psi2.values_mut(), &mut self.scratch);
    }

    fn nonlinear(&self, pair: &mut FilamentPair, t: f64) -> Result<(), DynamicsError> {
        let FilamentPair { psi1, psi2, .. } = pair;
        nonlinear_in_place(psi1.values_mut(), psi2.values_mut(), &self.nodes, t, self.stop)
    }
}

impl Stepper for PairStepper {
    type State = FilamentPair;

    fn step(&mut self, pair: &mut FilamentPair) -> Result<(), DynamicsError> {
        match self.scheme {
            Scheme::Lie => {
                self.nonlinear(pair, self.tau)?;
                self.linear(pair);
            }
            Scheme::Strang => {
                let backup = pair.clone();
                self.nonlinear(pair, 0.5 * self.tau)?;
                self.linear(pair);
                if let Err(e) = self.nonlinear(pair, 0.5 * self.tau) {
                    *pair = backup;
                    return Err(e);
                }
            }
        }
        pair.time += self.tau;
        Ok(())
    }

    fn tau(&self) -> f64 {
        self.tau
    }
}

/// Splitting stepper for the symmetric reduction `Ψ₂ = -conj(Ψ₁)`.
#[derive(Debug, Clone)]
pub struct ReducedStepper {
    scheme: Scheme,
    tau: f64,
    stop: f64,
    linear: FourierMultiplier,
    nodes: Vec<f64>,
    scratch: Vec<Complex64>,
}

impl ReducedStepper {
    pub fn new(grid: &Arc<PeriodicGrid>, scheme: Scheme, tau: f64, stop_separation: f64) -> Self {
        let linear = FourierMultiplier::free_schrodinger(grid, tau, 1.0);
        let scratch = vec![Complex64::new(0.0, 0.0); linear.scratch_len()];
        Self {
            scheme,
            tau,
            stop: stop_separation,
            linear,
            nodes: grid.nodes().to_vec(),
            scratch,
        }
    }

    pub fn for_config(grid: &Arc<PeriodicGrid>, config: &SplittingConfig) -> Self {
        Self::new(grid, config.scheme, config.tau, config.stop_separation)
    }
}

impl Stepper for ReducedStepper {
    type State = ComplexField;

    fn step(&mut self, psi: &mut ComplexField) -> Result<(), DynamicsError> {
        match self.scheme {
            Scheme::Lie => {
                reduced_nonlinear_in_place(psi.values_mut(), &self.nodes, self.tau, self.stop)?;
                self.linear.apply_in_place(psi.values_mut(), &mut self.scratch);
            }
            Scheme::Strang => {
                let backup = psi.clone();
                let half = 0.5 * self.tau;
                reduced_nonlinear_in_place(psi.values_mut(), &self.nodes, half, self.stop)?;
                self.linear.apply_in_place(psi.values_mut(), &mut self.scratch);
                if let Err(e) =
                    reduced_nonlinear_in_place(psi.values_mut(), &self.nodes, half, self.stop)
                {
                    *psi = backup;
                    return Err(e);
                }
            }
        }
        Ok(())
    }

    fn tau(&self) -> f64 {
        self.tau
    }
}

/// One Lie step (interaction then dispersion).
pub fn lie_step(
    pair: &FilamentPair,
    tau: f64,
    stop_separation: f64,
) -> Result<FilamentPair, DynamicsError> {
    let mut out = pair.clone();
    PairStepper::new(pair.grid(), pair.alpha1, pair.alpha2, Scheme::Lie, tau, stop_separation)
        .step(&mut out)?;
    Ok(out)
}

/// One Strang step (half interaction, dispersion, half interaction).
pub fn strang_step(
    pair: &FilamentPair,
    tau: f64,
    stop_separation: f64,
) -> Result<FilamentPair, DynamicsError> {
    let mut out = pair.clone();
    PairStepper::new(
        pair.grid(),
        pair.alpha1,
        pair.alpha2,
        Scheme::Strang,
        tau,
        stop_separation,
    )
    .step(&mut out)?;
    Ok(out)
}

pub fn reduced_step(
    psi1: &ComplexField,
    tau: f64,
    scheme: Scheme,
    stop_separation: f64,
) -> Result<ComplexField, DynamicsError> {
    let mut out = psi1.clone();
    ReducedStepper::new(psi1.grid(), scheme, tau, stop_separation).step(&mut out)?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ReachedTEnd,
    SeparationBelowThreshold,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<S> {
    pub time: f64,
    pub state: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    pub snapshots: Vec<Snapshot<S>>,
    pub config: SplittingConfig,
    pub termination: Termination,
    /// Steps actually applied.
    pub steps: usize,
    /// Set when the run stopped on [`DynamicsError::SeparationUnderflow`].
    pub underflow: Option<DynamicsError>,
}

impl<S> Trajectory<S> {
    pub fn final_time(&self) -> f64 {
        self.snapshots.last().map_or(0.0, |s| s.time)
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.time).collect()
    }
}

/// Steps `initial` until `t_end` or until the separation guard trips.
///
/// Snapshots are taken every `snapshot_stride` steps starting at `t = 0`; the
/// last state reached is always recorded, so a stopped run ends with the
/// closest state before the collision.
pub fn run<St: Stepper>(
    stepper: &mut St,
    initial: St::State,
    config: &SplittingConfig,
) -> Trajectory<St::State> {
    let total = config.num_steps();
    let stride = config.snapshot_stride.max(1);
    let mut state = initial;
    let mut snapshots = vec![Snapshot {
        time: 0.0,
        state: state.clone(),
    }];
    let mut termination = Termination::ReachedTEnd;
    let mut underflow = None;
    let mut steps = 0usize;
    while steps < total {
        match stepper.step(&mut state) {
            Ok(()) => {
                steps += 1;
                if steps % stride == 0 || steps == total {
                    snapshots.push(Snapshot {
                        time: steps as f64 * config.tau,
                        state: state.clone(),
                    });
                }
            }
            Err(e) => {
                termination = Termination::SeparationBelowThreshold;
                underflow = Some(e);
                if steps % stride != 0 {
                    snapshots.push(Snapshot {
                        time: steps as f64 * config.tau,
                        state: state.clone(),
                    });
                }
                break;
            }
        }
    }
    Trajectory {
        snapshots,
        config: *config,
        termination,
        steps,
        underflow,
    }
}

/// Runs the two-filament system after validating the configuration.
pub fn run_pair(
    initial: FilamentPair,
    config: &SplittingConfig,
) -> Result<Trajectory<FilamentPair>, DynamicsError> {
    config.validate(initial.grid())?;
    let mut stepper = PairStepper::for_pair(&initial, config);
    let mut traj = run(&mut stepper, initial, config);
    for snap in &mut traj.snapshots {
        snap.state.time = snap.time;
    }
    Ok(traj)
}

/// Runs the symmetric reduced equation after validating the configuration.
pub fn run_reduced(
    initial: ComplexField,
    config: &SplittingConfig,
) -> Result<Trajectory<ComplexField>, DynamicsError> {
    config.validate(initial.grid())?;
    let mut stepper = ReducedStepper::for_config(initial.grid(), config);
    Ok(run(&mut stepper, initial, config))
}
