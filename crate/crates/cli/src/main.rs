use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use filament_cli::config::{ExperimentConfig, Preset};
use filament_cli::error::CliError;
use filament_cli::runner::{run_preset, RunOptions};

#[derive(Parser)]
#[command(name = "filament", version, about = "Collisions of nearly parallel vortex filament pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct PresetArgs {
    /// Preset name, see `filament list`.
    #[arg(long)]
    preset: Preset,
    /// Coarser grid for quick checks.
    #[arg(long)]
    fast: bool,
    /// `key=value` parameter override; may be repeated.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Collision detection threshold.
    #[arg(long)]
    threshold: Option<f64>,
    /// Accepted for compatibility; runs are deterministic.
    #[arg(long)]
    seedless: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset and write its artifacts.
    Run {
        #[command(flatten)]
        args: PresetArgs,
        /// Output directory (default `out/<preset>`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Skip the gnuplot scripts.
        #[arg(long)]
        no_plots: bool,
    },
    /// List the presets.
    List,
    /// Check a configuration without running it.
    Validate {
        #[command(flatten)]
        args: PresetArgs,
    },
}

fn build(args: &PresetArgs) -> Result<ExperimentConfig, CliError> {
    let mut config = ExperimentConfig::preset(args.preset, args.fast);
    for o in &args.overrides {
        config.apply_override(o)?;
    }
    if let Some(t) = args.threshold {
        config.threshold = t;
    }
    Ok(config)
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::List => {
            for p in Preset::ALL {
                println!("{}: {}", p.name(), p.description());
            }
        }
        Command::Validate { args } => {
            let config = build(&args)?;
            let cfl = config.validate()?;
            println!("{}", config.describe());
            match cfl {
                Some(c) => println!("cfl_number = {c:.6} (limit pi)"),
                None => println!("cfl_number = n/a"),
            }
            println!("ok");
        }
        Command::Run { args, out, no_plots } => {
            let config = build(&args)?;
            let out = out.unwrap_or_else(|| PathBuf::from("out").join(config.preset.name()));
            let outcome = run_preset(
                &config,
                &RunOptions {
                    out: Some(out.clone()),
                    plots: !no_plots,
                },
            )?;
            let m = &outcome.manifest;
            println!("preset {} finished in {:.2} s", m.preset, outcome.wall_clock_seconds);
            if let Some(sim) = &m.simulation {
                println!("  {} steps, final t = {:.6}, stop: {:?}", sim.steps, sim.final_time, sim.termination);
            }
            match &m.collision {
                Some(c) => println!(
                    "  collision at t* = {:.6}, sigma* = {:.6}, min = {:.3e}{}",
                    c.t_star,
                    c.sigma_star,
                    c.min_separation,
                    if c.twin { " (twin)" } else { "" }
                ),
                None if m.simulation.is_some() || m.duhamel.is_some() => println!("  no collision detected"),
                None => {}
            }
            if let Some(d) = &m.invariants.conserved_difference_drift {
                println!("  conserved difference drift {d:.3e}");
            }
            if let Some(c) = &m.convergence {
                for member in &c.members {
                    println!("  {:?} tau = {:e}: error {:.3e}", member.scheme, member.tau, member.error);
                }
                println!("  orders: lie {:?}, strang {:?}", c.lie_order, c.strang_order);
            }
            if let Some(d) = &m.duhamel {
                println!(
                    "  |D(0)| = {:.1e}, growth constant {:.4}, self-convergence {:.2e}",
                    d.norm_at_zero, d.growth_constant, d.self_convergence
                );
            }
            if let Some(p) = &m.profile {
                println!(
                    "  {} iterations, contraction {:.3e}, residual {:.2e}, in E: {}",
                    p.summary.iterations, p.summary.contraction_ratio, p.reconstruction_residual, p.in_set_e
                );
            }
            println!("  artifacts in {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
