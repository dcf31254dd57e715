//! Executes a preset and writes its artifacts.

use std::path::PathBuf;
use std::time::Instant;

use filament_core::diagnostics::{
    affine_growth_constant, conserved_difference_norm, convergence_order, detect_collision, min_separation,
    real_part_min,
};
use filament_core::dynamics::{run_pair, run_reduced, Snapshot, Termination};
use filament_core::exact::{
    bpss_initial_psi, duhamel_d, duhamel_series, gaussian_datum, gaussian_field, mild_pair, mild_pair_from_duhamel,
    reduced_gaussian_datum, MildSolutionParams, QuadratureSummary,
};
use filament_core::quadrature::QuadratureRule;
use filament_core::selfsimilar::{
    reconstruction_heights, reconstruction_residual, solve_fixed_point, HalfLineGrid, ProfileSummary,
    SolveOptions, RECONSTRUCTION_STEP,
};
use filament_core::{Complex64, ComplexField, FilamentPair, Scheme, SplittingConfig, Trajectory};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Kind, Preset, SecondFilament};
use crate::error::CliError;
use crate::output::*;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Directory for artifacts; nothing is written when unset.
    pub out: Option<PathBuf>,
    pub plots: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub manifest: Manifest,
    pub wall_clock_seconds: f64,
}

/// Gauss–Legendre oracle used by the convergence preset.
pub fn convergence_oracle(grid: &std::sync::Arc<filament_core::PeriodicGrid>) -> MildSolutionParams {
    MildSolutionParams::new(grid)
        .with_rule(QuadratureRule::GaussLegendre { order: 8 })
        .with_steps(200)
        .with_refinement(None)
}

pub fn run_preset(config: &ExperimentConfig, options: &RunOptions) -> Result<RunOutcome, CliError> {
    let start = Instant::now();
    let cfl_number = config.validate()?;
    let mut out = match &options.out {
        Some(dir) => Some(OutputDir::create(dir)?),
        None => None,
    };
    let mut manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        program: "filament".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        preset: config.preset,
        description: config.preset.description().into(),
        parameters: config.clone(),
        cfl_number,
        simulation: None,
        collision: None,
        invariants: Invariants::default(),
        duhamel: None,
        convergence: None,
        profile: None,
        timing_file: TIMING_FILE.into(),
        files: Vec::new(),
    };
    match config.preset.kind() {
        Kind::Pair => {
            let grid = config.grid()?;
            let traj = run_pair(pair_datum(config, &grid), &splitting(config))?;
            summarise_pair(config, &traj, &mut manifest);
            export_pair(config, &traj, &mut manifest, out.as_mut(), options.plots)?;
        }
        Kind::Reduced => {
            let grid = config.grid()?;
            let datum = match config.preset {
                Preset::Bpss => bpss_initial_psi(config.m, config.chirp, &grid)?,
                _ => reduced_gaussian_datum(&grid, config.offset),
            };
            let traj = run_reduced(datum, &splitting(config))?;
            manifest.simulation = Some(simulation_summary(&traj));
            manifest.collision = detect_collision(&traj, config.threshold);
            let minima: Vec<(f64, f64)> = traj.snapshots.iter().map(|s| real_part_min(&s.state)).collect();
            let picks = export_indices(traj.snapshots.len(), config.output_snapshots, manifest.collision.as_ref().map(|c| c.snapshot));
            manifest.invariants.minimum_history = history(&traj.snapshots, &minima, &picks);
            if let Some(out) = out.as_mut() {
                out.write("minimum.csv", &minimum_csv(&traj.snapshots, &minima))?;
                let entries = export_snapshots(out, &traj.snapshots, &picks, reduced_csv)?;
                if options.plots {
                    out.write(PLOT_FILE, &curves_plot(&entries, false))?;
                }
            }
        }
        Kind::Mild => run_mild(config, &mut manifest, out.as_mut(), options.plots)?,
        Kind::Convergence => run_convergence(config, &mut manifest, out.as_mut(), options.plots)?,
        Kind::Profile => run_profile(config, &mut manifest, out.as_mut(), options.plots)?,
    }
    let wall_clock_seconds = start.elapsed().as_secs_f64();
    if let Some(out) = out.as_mut() {
        manifest.files = out.files().to_vec();
        out.write(MANIFEST_FILE, &manifest_json(&manifest)?)?;
        let timing = serde_json::to_string_pretty(&Timing { wall_clock_seconds })
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        out.write(TIMING_FILE, &(timing + "\n"))?;
    }
    Ok(RunOutcome {
        manifest,
        wall_clock_seconds,
    })
}

fn splitting(config: &ExperimentConfig) -> SplittingConfig {
    SplittingConfig::new(config.scheme, config.tau, config.t_end).with_stop_separation(config.stop_separation)
}

/// `Ψ₁(0) = c - G` and `Ψ₂(0) = -c + G` (or `-c + conj(G)`).
pub fn pair_datum(config: &ExperimentConfig, grid: &std::sync::Arc<filament_core::PeriodicGrid>) -> FilamentPair {
    let g = gaussian_field(grid);
    let c = config.offset;
    let psi1 = g.map(|g| c - g);
    let psi2 = match config.second {
        SecondFilament::Mirror => g.map(|g| -c + g),
        SecondFilament::Symmetric => g.map(|g| -c + g.conj()),
    };
    FilamentPair::new(psi1, psi2, config.alpha1, config.alpha2)
}

fn simulation_summary<S>(traj: &Trajectory<S>) -> SimulationSummary {
    SimulationSummary {
        termination: traj.termination,
        steps: traj.steps,
        final_time: traj.final_time(),
        stored_snapshots: traj.snapshots.len(),
        underflow: traj.underflow.as_ref().map(|e| e.to_string()),
    }
}

/// Evenly spread snapshot indices (first and last included) plus `extra`.
pub fn export_indices(len: usize, count: usize, extra: Option<usize>) -> Vec<usize> {
    if len == 0 {
        return Vec::new();
    }
    let count = count.max(2).min(len);
    let mut picks: Vec<usize> = if count == 1 || len == 1 {
        vec![0]
    } else {
        (0..count).map(|i| (i * (len - 1) + (count - 1) / 2) / (count - 1)).collect()
    };
    picks.extend(extra.filter(|&e| e < len));
    picks.sort_unstable();
    picks.dedup();
    picks
}

fn history<S>(snapshots: &[Snapshot<S>], minima: &[(f64, f64)], picks: &[usize]) -> Vec<[f64; 3]> {
    picks
        .iter()
        .map(|&i| [snapshots[i].time, minima[i].0, minima[i].1])
        .collect()
}

fn minimum_csv<S>(snapshots: &[Snapshot<S>], minima: &[(f64, f64)]) -> String {
    let mut s = String::from("time,minimum,sigma\n");
    for (snap, (v, x)) in snapshots.iter().zip(minima) {
        s.push_str(&format!("{},{v},{x}\n", snap.time));
    }
    s
}

fn export_snapshots<S>(
    out: &mut OutputDir,
    snapshots: &[Snapshot<S>],
    picks: &[usize],
    render: impl Fn(&S) -> String,
) -> Result<Vec<(String, f64)>, CliError> {
    let mut entries = Vec::with_capacity(picks.len());
    for &i in picks {
        let name = snapshot_name(i);
        out.write(&name, &render(&snapshots[i].state))?;
        entries.push((name, snapshots[i].time));
    }
    out.write(INDEX_FILE, &index_csv(&entries))?;
    Ok(entries)
}

fn summarise_pair(config: &ExperimentConfig, traj: &Trajectory<FilamentPair>, manifest: &mut Manifest) {
    manifest.simulation = Some(simulation_summary(traj));
    manifest.collision = detect_collision(traj, config.threshold);
    manifest.invariants.conserved_difference_drift = Some(conserved_difference_norm(traj).max_relative_drift);
    manifest.invariants.conserved_difference_expected = Some(config.alpha1 == -config.alpha2);
    manifest.invariants.symmetry_defect = Some(
        traj.snapshots
            .iter()
            .map(|s| s.state.psi2.zip_with(&s.state.psi1, |b, a| b + a.conj()).max_abs())
            .fold(0.0, f64::max),
    );
}

fn export_pair(
    config: &ExperimentConfig,
    traj: &Trajectory<FilamentPair>,
    manifest: &mut Manifest,
    out: Option<&mut OutputDir>,
    plots: bool,
) -> Result<(), CliError> {
    let minima: Vec<(f64, f64)> = traj.snapshots.iter().map(|s| min_separation(&s.state)).collect();
    let picks = export_indices(traj.snapshots.len(), config.output_snapshots, manifest.collision.as_ref().map(|c| c.snapshot));
    manifest.invariants.minimum_history = history(&traj.snapshots, &minima, &picks);
    if let Some(out) = out {
        out.write("minimum.csv", &minimum_csv(&traj.snapshots, &minima))?;
        let entries = export_snapshots(out, &traj.snapshots, &picks, pair_csv)?;
        if plots {
            out.write(PLOT_FILE, &curves_plot(&entries, true))?;
        }
    }
    Ok(())
}

fn run_mild(
    config: &ExperimentConfig,
    manifest: &mut Manifest,
    out: Option<&mut OutputDir>,
    plots: bool,
) -> Result<(), CliError> {
    let grid = config.grid()?;
    let params = MildSolutionParams::new(&grid)
        .with_steps(config.quadrature_steps)
        .with_refinement(None);
    let step = config.oracle_step;
    let count = (config.t_end / step).round() as usize;
    let series = duhamel_series(step, count, &params)?;
    let snapshots: Vec<Snapshot<FilamentPair>> = series
        .iter()
        .enumerate()
        .map(|(n, d)| {
            let t = n as f64 * step;
            Snapshot {
                time: t,
                state: mild_pair_from_duhamel(t, d),
            }
        })
        .collect();
    let traj = Trajectory {
        snapshots,
        config: SplittingConfig::new(Scheme::Strang, step, config.t_end).with_stride(1),
        termination: Termination::ReachedTEnd,
        steps: count,
        underflow: None,
    };
    summarise_pair(config, &traj, manifest);
    manifest.simulation = None;

    let every = ((0.25 / step).round() as usize).max(1);
    let growth: Vec<[f64; 3]> = (0..=count)
        .step_by(every)
        .map(|n| {
            let t = n as f64 * step;
            let norm = series[n].l2_norm();
            [t, norm, norm / (1.0 + t)]
        })
        .collect();
    let pairs: Vec<(f64, f64)> = growth.iter().map(|g| (g[0], g[1])).collect();
    let after: Vec<f64> = growth.iter().filter(|g| g[0] >= 1.25 - 1e-12).map(|g| g[2]).collect();
    let check_time = 2.0f64.min(count as f64 * step);
    let check_index = (check_time / step).round() as usize;
    let fine = duhamel_d(
        check_index as f64 * step,
        &params.clone().with_steps(2 * config.quadrature_steps),
    )?;
    manifest.duhamel = Some(DuhamelReport {
        quadrature: QuadratureSummary::from(&params),
        norm_at_zero: series[0].l2_norm(),
        growth_constant: affine_growth_constant(&pairs),
        ratio_nonincreasing_after_collision: after.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)),
        growth,
        self_convergence_time: check_index as f64 * step,
        self_convergence: series[check_index].zip_with(&fine, |a, b| a - b).l2_norm(),
    });

    let mut out = out;
    if let Some(out) = out.as_deref_mut() {
        let mut csv = String::from("time,norm,norm_over_1_plus_t\n");
        for g in &manifest.duhamel.as_ref().unwrap().growth {
            csv.push_str(&format!("{},{},{}\n", g[0], g[1], g[2]));
        }
        out.write("duhamel.csv", &csv)?;
        if plots {
            out.write("duhamel.gp", &duhamel_plot())?;
        }
    }
    export_pair(config, &traj, manifest, out, plots)?;
    Ok(())
}

/// Error of one splitting run against the mild solution at `time`.
pub fn splitting_error(
    grid: &std::sync::Arc<filament_core::PeriodicGrid>,
    exact: &FilamentPair,
    scheme: Scheme,
    tau: f64,
    time: f64,
) -> Result<f64, CliError> {
    let steps = (time / tau).round();
    if ((steps * tau) - time).abs() > 1e-9 * time {
        return Err(CliError::Config(format!("time {time} is not a multiple of tau = {tau}")));
    }
    let cfg = SplittingConfig::new(scheme, tau, time).with_stride(steps as usize);
    let traj = run_pair(gaussian_datum(grid, 1.0, -1.0), &cfg)?;
    let last = &traj.snapshots.last().expect("at least the initial snapshot").state;
    if traj.termination != Termination::ReachedTEnd {
        return Err(CliError::Numerical(format!("run stopped early at t = {}", traj.final_time())));
    }
    let e1 = last.psi1.zip_with(&exact.psi1, |a, b| a - b).l2_norm();
    let e2 = last.psi2.zip_with(&exact.psi2, |a, b| a - b).l2_norm();
    Ok(e1.hypot(e2))
}

fn run_convergence(
    config: &ExperimentConfig,
    manifest: &mut Manifest,
    out: Option<&mut OutputDir>,
    plots: bool,
) -> Result<(), CliError> {
    let grid = config.grid()?;
    let oracle = convergence_oracle(&grid);
    let time = config.convergence_time;
    let exact = mild_pair(time, &oracle)?;
    let jobs: Vec<(Scheme, f64)> = [Scheme::Lie, Scheme::Strang]
        .into_iter()
        .flat_map(|s| config.convergence_taus.iter().map(move |&t| (s, t)))
        .collect();
    // members run concurrently; collect keeps the job order
    let results: Vec<Result<ConvergenceMember, CliError>> = jobs
        .par_iter()
        .map(|&(scheme, tau)| {
            splitting_error(&grid, &exact, scheme, tau, time).map(|error| ConvergenceMember { scheme, tau, error })
        })
        .collect();
    let members = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let order = |scheme: Scheme| {
        let data: Vec<(f64, f64)> = members
            .iter()
            .filter(|m| m.scheme == scheme)
            .map(|m| (m.tau, m.error))
            .collect();
        convergence_order(&data).ok()
    };
    manifest.convergence = Some(ConvergenceReport {
        time,
        oracle: QuadratureSummary::from(&oracle),
        lie_order: order(Scheme::Lie),
        strang_order: order(Scheme::Strang),
        members,
    });
    if let Some(out) = out {
        let mut csv = String::from("scheme,tau,error\n");
        for m in &manifest.convergence.as_ref().unwrap().members {
            let name = match m.scheme {
                Scheme::Lie => "lie",
                Scheme::Strang => "strang",
            };
            csv.push_str(&format!("{name},{},{}\n", m.tau, m.error));
        }
        out.write("convergence.csv", &csv)?;
        if plots {
            out.write(PLOT_FILE, &convergence_plot())?;
        }
    }
    Ok(())
}

fn run_profile(
    config: &ExperimentConfig,
    manifest: &mut Manifest,
    out: Option<&mut OutputDir>,
    plots: bool,
) -> Result<(), CliError> {
    let alpha = Complex64::new(config.alpha, config.alpha_im);
    let grid = HalfLineGrid::for_alpha(alpha, config.x_max, config.nodes)?;
    let options = SolveOptions {
        tol: config.tol,
        ..SolveOptions::default()
    };
    let profile = solve_fixed_point(alpha, options, &grid)?;
    let summary = ProfileSummary::of(&profile);
    let bound = profile
        .grid
        .nodes()
        .iter()
        .zip(&profile.u)
        .all(|(&x, u)| u.re >= 1.0 + x * alpha.re / 2.0);
    let residual = reconstruction_residual(&profile, 1.0, reconstruction_heights(), RECONSTRUCTION_STEP)?;
    if let Some(out) = out {
        out.write("profile.csv", &profile_csv(&profile, &summary))?;
        if plots {
            out.write(PLOT_FILE, &profile_plot())?;
        }
    }
    manifest.profile = Some(ProfileReport {
        in_set_e: summary.e_norm <= alpha.re / 4.0,
        real_part_bound_holds: bound,
        reconstruction_residual: residual,
        summary,
    });
    Ok(())
}

/// Reduced trajectory of a preset, for callers that need the states.
pub fn reduced_trajectory(config: &ExperimentConfig) -> Result<Trajectory<ComplexField>, CliError> {
    config.validate()?;
    let grid = config.grid()?;
    let datum = match config.preset {
        Preset::Bpss => bpss_initial_psi(config.m, config.chirp, &grid)?,
        _ => reduced_gaussian_datum(&grid, config.offset),
    };
    Ok(run_reduced(datum, &splitting(config))?)
}
