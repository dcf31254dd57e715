//! CSV snapshots, manifests and gnuplot scripts.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use filament_core::diagnostics::CollisionEvent;
use filament_core::dynamics::Termination;
use filament_core::exact::QuadratureSummary;
use filament_core::selfsimilar::{ProfileSummary, SelfSimilarProfile};
use filament_core::{ComplexField, FilamentPair, Scheme};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Preset};
use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";
pub const TIMING_FILE: &str = "timing.json";
pub const INDEX_FILE: &str = "index.csv";
pub const SNAPSHOT_DIR: &str = "snapshots";
pub const PLOT_FILE: &str = "plot.gp";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub termination: Termination,
    pub steps: usize,
    pub final_time: f64,
    pub stored_snapshots: usize,
    pub underflow: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Invariants {
    /// Relative drift of `‖Ψ₁ - Ψ₂ - 2‖` over the run.
    pub conserved_difference_drift: Option<f64>,
    /// Whether the cores are opposite, so that the drift should vanish.
    pub conserved_difference_expected: Option<bool>,
    /// `max |Ψ₂ + conj(Ψ₁)|` over all stored snapshots.
    pub symmetry_defect: Option<f64>,
    /// `(t, min, σ)` of the separation measure at the exported snapshots.
    pub minimum_history: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuhamelReport {
    pub quadrature: QuadratureSummary,
    pub norm_at_zero: f64,
    /// `(t, ‖D(t)‖, ‖D(t)‖/(1+t))`.
    pub growth: Vec<[f64; 3]>,
    pub growth_constant: f64,
    /// Whether `‖D(t)‖/(1+t)` is non-increasing for `t ≥ 1.25`.
    pub ratio_nonincreasing_after_collision: bool,
    pub self_convergence_time: f64,
    /// `‖D_h - D_{h/2}‖` at `self_convergence_time`.
    pub self_convergence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceMember {
    pub scheme: Scheme,
    pub tau: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub time: f64,
    pub oracle: QuadratureSummary,
    pub members: Vec<ConvergenceMember>,
    pub lie_order: Option<f64>,
    pub strang_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub summary: ProfileSummary,
    pub in_set_e: bool,
    pub real_part_bound_holds: bool,
    /// Residual of the reduced equation for the reconstructed filament at
    /// `t = 1`.
    pub reconstruction_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub program: String,
    pub version: String,
    pub preset: Preset,
    pub description: String,
    pub parameters: ExperimentConfig,
    pub cfl_number: Option<f64>,
    pub simulation: Option<SimulationSummary>,
    pub collision: Option<CollisionEvent>,
    pub invariants: Invariants,
    pub duhamel: Option<DuhamelReport>,
    pub convergence: Option<ConvergenceReport>,
    pub profile: Option<ProfileReport>,
    pub timing_file: String,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_clock_seconds: f64,
}

/// Writes files below a run directory and remembers their relative paths.
pub struct OutputDir {
    root: PathBuf,
    files: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    pub fn write(&mut self, relative: &str, contents: &str) -> Result<(), CliError> {
        let path = self.root.join(relative);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        let file = fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut out = BufWriter::new(file);
        out.write_all(contents.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|e| CliError::io(&path, e))?;
        self.files.push(relative.to_string());
        Ok(())
    }
}

pub fn snapshot_name(index: usize) -> String {
    format!("{SNAPSHOT_DIR}/snap_{index:05}.csv")
}

pub fn pair_csv(pair: &FilamentPair) -> String {
    let mut s = String::from("sigma,re_psi1,im_psi1,re_psi2,im_psi2\n");
    let nodes = pair.grid().nodes();
    for (j, &x) in nodes.iter().enumerate() {
        let a = pair.psi1.values()[j];
        let b = pair.psi2.values()[j];
        let _ = writeln!(s, "{x},{},{},{},{}", a.re, a.im, b.re, b.im);
    }
    s
}

pub fn reduced_csv(field: &ComplexField) -> String {
    let mut s = String::from("sigma,re_psi1,im_psi1\n");
    for (&x, z) in field.grid().nodes().iter().zip(field.values()) {
        let _ = writeln!(s, "{x},{},{}", z.re, z.im);
    }
    s
}

pub fn index_csv(entries: &[(String, f64)]) -> String {
    let mut s = String::from("file,time\n");
    for (name, t) in entries {
        let _ = writeln!(s, "{name},{t}");
    }
    s
}

pub fn profile_csv(profile: &SelfSimilarProfile, summary: &ProfileSummary) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# alpha = {}{:+}i", summary.alpha_re, summary.alpha_im);
    let _ = writeln!(s, "# x_max = {}", summary.x_max);
    let _ = writeln!(s, "# n = {}", summary.n);
    let _ = writeln!(s, "# iterations = {}", summary.iterations);
    let _ = writeln!(s, "# final_update = {:e}", summary.final_update);
    let _ = writeln!(s, "# contraction_ratio = {:e}", summary.contraction_ratio);
    let _ = writeln!(s, "# corner_slope = {}{:+}i", summary.corner_slope_re, summary.corner_slope_im);
    s.push_str("x,re_w,im_w,re_u,im_u\n");
    for (i, &x) in profile.grid.nodes().iter().enumerate() {
        let (w, u) = (profile.w[i], profile.u[i]);
        let _ = writeln!(s, "{x},{},{},{},{}", w.re, w.im, u.re, u.im);
    }
    s
}

pub fn manifest_json(manifest: &Manifest) -> Result<String, CliError> {
    serde_json::to_string_pretty(manifest)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Numerical(format!("manifest serialisation: {e}")))
}

fn plot_header(title: &str) -> String {
    format!(
        "# gnuplot script: {title}\n\
         set terminal pngcairo size 900,700\n\
         set datafile separator ','\n\
         set key top left\n"
    )
}

/// One PNG per exported snapshot, curves drawn as `(Re ψ, Im ψ, σ)`.
pub fn curves_plot(entries: &[(String, f64)], two_filaments: bool) -> String {
    let mut s = plot_header("filament curves (Re psi, Im psi, sigma)");
    s.push_str("set xlabel 'Re psi'\nset ylabel 'Im psi'\nset zlabel 'sigma'\n");
    for (name, t) in entries {
        let png = name.replace(".csv", ".png");
        let _ = writeln!(s, "set output '{png}'\nset title 't = {t:.5}'");
        if two_filaments {
            let _ = writeln!(
                s,
                "splot '{name}' every ::1 using 2:3:1 with lines title 'psi1', '' every ::1 using 4:5:1 with lines title 'psi2'"
            );
        } else {
            let _ = writeln!(
                s,
                "splot '{name}' every ::1 using 2:3:1 with lines title 'psi1', '' every ::1 using (-$2):3:1 with lines title '-conj(psi1)'"
            );
        }
    }
    s
}

pub fn profile_plot() -> String {
    let mut s = plot_header("self-similar profile");
    s.push_str(
        "set output 'profile.png'\n\
         set xlabel 'x'\n\
         plot 'profile.csv' every ::1 using 1:4 with lines title 'Re u', \
         '' every ::1 using 1:5 with lines title 'Im u', \
         '' every ::1 using 1:2 with lines title 'Re w', \
         '' every ::1 using 1:3 with lines title 'Im w'\n",
    );
    s
}

pub fn convergence_plot() -> String {
    let mut s = plot_header("splitting error against the mild solution");
    s.push_str(
        "set output 'convergence.png'\n\
         set logscale xy\n\
         set xlabel 'tau'\nset ylabel 'error'\n\
         plot 'convergence.csv' every ::1 using 2:(strcol(1) eq 'lie' ? $3 : 1/0) with linespoints title 'Lie', \
         '' every ::1 using 2:(strcol(1) eq 'strang' ? $3 : 1/0) with linespoints title 'Strang'\n",
    );
    s
}

pub fn duhamel_plot() -> String {
    let mut s = plot_header("norm of the Duhamel term");
    s.push_str(
        "set output 'duhamel.png'\n\
         set xlabel 't'\n\
         plot 'duhamel.csv' every ::1 using 1:2 with linespoints title '|D(t)|', \
         '' every ::1 using 1:3 with linespoints title '|D(t)|/(1+t)'\n",
    );
    s
}
