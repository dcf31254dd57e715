//! Experiment presets and their effective parameters.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use filament_core::diagnostics::{PAIR_THRESHOLD, REDUCED_THRESHOLD};
use filament_core::dynamics::{check_cfl, Scheme, DEFAULT_STOP_SEPARATION};
use filament_core::exact::{Chirp, DEFAULT_QUADRATURE_STEPS};
use filament_core::selfsimilar::{DEFAULT_NODES, DEFAULT_X_MAX};
use filament_core::PeriodicGrid;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Opposite,
    SameNosym,
    SameSym,
    ReducedFull,
    Reduced06,
    Bpss,
    Selfsimilar,
    MildOracle,
    Convergence,
}

/// What a preset computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Pair,
    Reduced,
    Profile,
    Mild,
    Convergence,
}

impl Preset {
    pub const ALL: [Preset; 9] = [
        Preset::Opposite,
        Preset::SameNosym,
        Preset::SameSym,
        Preset::ReducedFull,
        Preset::Reduced06,
        Preset::Bpss,
        Preset::Selfsimilar,
        Preset::MildOracle,
        Preset::Convergence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Opposite => "opposite",
            Preset::SameNosym => "same_nosym",
            Preset::SameSym => "same_sym",
            Preset::ReducedFull => "reduced_full",
            Preset::Reduced06 => "reduced_06",
            Preset::Bpss => "bpss",
            Preset::Selfsimilar => "selfsimilar",
            Preset::MildOracle => "mild_oracle",
            Preset::Convergence => "convergence",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Preset::Opposite => {
                "Ψ₁(0)=1−G, Ψ₂(0)=−1+G, α₁=−α₂=1, K=1024, L=10; exact collision at t=1, σ=0"
            }
            Preset::SameNosym => {
                "Ψ₁(0)=1−G, Ψ₂(0)=−1+G, α₁=α₂=1, L=20; nonsymmetric collision near t≈2.64"
            }
            Preset::SameSym => {
                "Ψ₁(0)=1−G, Ψ₂(0)=−1+conj(G), α₁=α₂=1, L=10; symmetric collision near t≈0.83"
            }
            Preset::ReducedFull => "reduced equation, Ψ₁(0)=1−G; collision near t≈0.83 at σ=0",
            Preset::Reduced06 => {
                "reduced equation, Ψ₁(0)=0.6−G; collision near t≈0.18 at two symmetric points"
            }
            Preset::Bpss => {
                "reduced equation, Ψ₁(0)=1/(1+v₀) with the dispersive blow-up datum v₀, m=1/2, focusing chirp"
            }
            Preset::Selfsimilar => "self-similar collision profile by Picard iteration, α=20, x_max=50",
            Preset::MildOracle => "exact mild solution for opposite cores, D by quadrature; collision at t=1",
            Preset::Convergence => "Lie and Strang errors against the mild solution at t=0.5, three τ",
        }
    }

    pub fn kind(self) -> Kind {
        match self {
            Preset::Opposite | Preset::SameNosym | Preset::SameSym => Kind::Pair,
            Preset::ReducedFull | Preset::Reduced06 | Preset::Bpss => Kind::Reduced,
            Preset::Selfsimilar => Kind::Profile,
            Preset::MildOracle => Kind::Mild,
            Preset::Convergence => Kind::Convergence,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == key)
            .ok_or_else(|| {
                let names: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
                CliError::Config(format!("unknown preset '{s}' (one of {})", names.join(", ")))
            })
    }
}

/// How the second filament is initialised in pair presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SecondFilament {
    /// `Ψ₂(0) = -1 + G`.
    Mirror,
    /// `Ψ₂(0) = -1 + conj(G)`, i.e. `Ψ₂ = -conj(Ψ₁)`.
    Symmetric,
}

/// Full set of effective parameters of a run. Fields that a preset does not
/// use keep their defaults and are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub fast: bool,
    pub k: usize,
    pub l: f64,
    pub tau: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub threshold: f64,
    pub stop_separation: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub second: SecondFilament,
    /// Constant `c` of the data `c - G`.
    pub offset: f64,
    pub m: f64,
    pub chirp: Chirp,
    pub alpha: f64,
    pub alpha_im: f64,
    pub x_max: f64,
    pub nodes: usize,
    pub tol: f64,
    pub quadrature_steps: usize,
    pub oracle_step: f64,
    pub convergence_time: f64,
    pub convergence_taus: Vec<f64>,
    pub output_snapshots: usize,
}

/// Number of nodes of the `--fast` variants.
pub const FAST_K: usize = 256;

impl ExperimentConfig {
    pub fn preset(preset: Preset, fast: bool) -> Self {
        let k = if fast { FAST_K } else { 1024 };
        let mut c = Self {
            preset,
            fast,
            k,
            l: 10.0,
            tau: PI / (k * k) as f64,
            t_end: 1.5,
            scheme: Scheme::Strang,
            threshold: PAIR_THRESHOLD,
            stop_separation: DEFAULT_STOP_SEPARATION,
            alpha1: 1.0,
            alpha2: 1.0,
            second: SecondFilament::Mirror,
            offset: 1.0,
            m: 0.5,
            chirp: Chirp::Focusing,
            alpha: 20.0,
            alpha_im: 0.0,
            x_max: DEFAULT_X_MAX,
            nodes: if fast { 16385 } else { DEFAULT_NODES },
            tol: 1e-10,
            quadrature_steps: DEFAULT_QUADRATURE_STEPS,
            oracle_step: 0.01,
            convergence_time: 0.5,
            convergence_taus: vec![8e-5, 4e-5, 2e-5],
            output_snapshots: 40,
        };
        match preset {
            Preset::Opposite => c.alpha2 = -1.0,
            Preset::SameNosym => {
                c.l = 20.0;
                c.t_end = 3.5;
            }
            Preset::SameSym => c.second = SecondFilament::Symmetric,
            Preset::ReducedFull => c.threshold = REDUCED_THRESHOLD,
            Preset::Reduced06 => {
                c.threshold = REDUCED_THRESHOLD;
                c.offset = 0.6;
                c.t_end = 0.5;
            }
            Preset::Bpss => {
                c.threshold = REDUCED_THRESHOLD;
                c.t_end = 1.0;
            }
            Preset::Selfsimilar => {}
            Preset::MildOracle => {
                c.alpha2 = -1.0;
                c.t_end = 3.0;
                if fast {
                    c.quadrature_steps = 1000;
                }
            }
            Preset::Convergence => c.alpha2 = -1.0,
        }
        c
    }

    /// Applies `key=value`.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), CliError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("override '{assignment}' is not key=value")))?;
        let key = key.trim();
        let value = value.trim();
        fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
            value
                .parse()
                .map_err(|_| CliError::Config(format!("cannot parse '{value}' for '{key}'")))
        }
        match key {
            "k" | "K" => self.k = parse(key, value)?,
            "l" | "L" => self.l = parse(key, value)?,
            "tau" => self.tau = parse(key, value)?,
            "t_end" => self.t_end = parse(key, value)?,
            "scheme" => self.scheme = value.parse().map_err(CliError::Config)?,
            "threshold" => self.threshold = parse(key, value)?,
            "stop_separation" => self.stop_separation = parse(key, value)?,
            "alpha1" => self.alpha1 = parse(key, value)?,
            "alpha2" => self.alpha2 = parse(key, value)?,
            "offset" => self.offset = parse(key, value)?,
            "m" => self.m = parse(key, value)?,
            "chirp" => self.chirp = value.parse().map_err(CliError::Config)?,
            "alpha" => self.alpha = parse(key, value)?,
            "alpha_im" => self.alpha_im = parse(key, value)?,
            "x_max" => self.x_max = parse(key, value)?,
            "nodes" | "n" => self.nodes = parse(key, value)?,
            "tol" => self.tol = parse(key, value)?,
            "quadrature_steps" => self.quadrature_steps = parse(key, value)?,
            "oracle_step" => self.oracle_step = parse(key, value)?,
            "convergence_time" => self.convergence_time = parse(key, value)?,
            "convergence_taus" => {
                self.convergence_taus = value
                    .split(|c| c == ',' || c == ';')
                    .map(|v| parse(key, v.trim()))
                    .collect::<Result<_, _>>()?
            }
            "output_snapshots" => self.output_snapshots = parse(key, value)?,
            other => return Err(CliError::Config(format!("unknown override key '{other}'"))),
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<std::sync::Arc<PeriodicGrid>, CliError> {
        Ok(PeriodicGrid::new(self.l, self.k)?)
    }

    /// Checks the parameters without computing anything; returns the CFL
    /// number of time-stepping presets.
    pub fn validate(&self) -> Result<Option<f64>, CliError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::Config(format!("{name} = {v} must be positive")))
            }
        };
        if self.output_snapshots < 2 {
            return Err(CliError::Config("output_snapshots must be at least 2".into()));
        }
        match self.preset.kind() {
            Kind::Profile => {
                positive("alpha", self.alpha)?;
                positive("x_max", self.x_max)?;
                positive("tol", self.tol)?;
                if self.nodes < 8 {
                    return Err(CliError::Config(format!("nodes = {} is too small", self.nodes)));
                }
                Ok(None)
            }
            Kind::Mild => {
                self.grid()?;
                positive("t_end", self.t_end)?;
                positive("threshold", self.threshold)?;
                positive("oracle_step", self.oracle_step)?;
                if self.quadrature_steps == 0 {
                    return Err(CliError::Config("quadrature_steps must be positive".into()));
                }
                Ok(None)
            }
            Kind::Convergence => {
                let grid = self.grid()?;
                positive("convergence_time", self.convergence_time)?;
                if self.convergence_taus.len() < 3 {
                    return Err(CliError::Config("convergence needs at least three tau values".into()));
                }
                let mut worst: f64 = 0.0;
                for &tau in &self.convergence_taus {
                    worst = worst.max(check_cfl(&grid, tau).map_err(CliError::Cfl)?);
                }
                Ok(Some(worst))
            }
            Kind::Pair | Kind::Reduced => {
                let grid = self.grid()?;
                positive("t_end", self.t_end)?;
                positive("threshold", self.threshold)?;
                if !(self.stop_separation >= 0.0) {
                    return Err(CliError::Config("stop_separation must be non-negative".into()));
                }
                if self.preset == Preset::Bpss && !(self.m > 0.25 && self.m <= 0.5) {
                    return Err(CliError::Config(format!("m = {} must lie in (1/4, 1/2]", self.m)));
                }
                Ok(Some(check_cfl(&grid, self.tau).map_err(CliError::Cfl)?))
            }
        }
    }

    /// Human-readable listing of the parameters the preset uses.
    pub fn describe(&self) -> String {
        let mut lines = vec![format!("preset: {}{}", self.preset, if self.fast { " (fast)" } else { "" })];
        match self.preset.kind() {
            Kind::Pair | Kind::Reduced => {
                lines.push(format!("K = {}, L = {}, tau = {:e}, t_end = {}", self.k, self.l, self.tau, self.t_end));
                lines.push(format!(
                    "scheme = {:?}, threshold = {}, stop_separation = {:e}",
                    self.scheme, self.threshold, self.stop_separation
                ));
                match self.preset {
                    Preset::Bpss => lines.push(format!("m = {}, chirp = {:?}", self.m, self.chirp)),
                    Preset::ReducedFull | Preset::Reduced06 => {
                        lines.push(format!("datum = {} - G", self.offset))
                    }
                    _ => lines.push(format!(
                        "alpha1 = {}, alpha2 = {}, datum offset = {}, second filament = {:?}",
                        self.alpha1, self.alpha2, self.offset, self.second
                    )),
                }
            }
            Kind::Profile => lines.push(format!(
                "alpha = {}{:+}i, x_max = {}, nodes = {}, tol = {:e}",
                self.alpha, self.alpha_im, self.x_max, self.nodes, self.tol
            )),
            Kind::Mild => lines.push(format!(
                "K = {}, L = {}, t_end = {}, snapshot step = {}, quadrature steps per unit time = {}",
                self.k, self.l, self.t_end, self.oracle_step, self.quadrature_steps
            )),
            Kind::Convergence => lines.push(format!(
                "K = {}, L = {}, t = {}, tau = {:?}",
                self.k, self.l, self.convergence_time, self.convergence_taus
            )),
        }
        lines.join("\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("nope".parse::<Preset>().is_err());
    }

    #[test]
    fn opposite_cfl_number() {
        let c = ExperimentConfig::preset(Preset::Opposite, false);
        let cfl = c.validate().unwrap().unwrap();
        assert!((cfl - PI / 100.0).abs() < 1e-15);
        let fast = ExperimentConfig::preset(Preset::Opposite, true);
        assert!((fast.validate().unwrap().unwrap() - PI / 100.0).abs() < 1e-15);
    }

    #[test]
    fn overrides() {
        let mut c = ExperimentConfig::preset(Preset::Bpss, false);
        c.apply_override("chirp=defocusing").unwrap();
        c.apply_override("m = 0.4").unwrap();
        assert_eq!(c.chirp, Chirp::Defocusing);
        assert_eq!(c.m, 0.4);
        assert!(c.apply_override("m").is_err());
        assert!(c.apply_override("bogus=1").is_err());
        c.apply_override("tau=1e-3").unwrap();
        assert!(matches!(c.validate(), Err(CliError::Cfl(_))));
    }
}
