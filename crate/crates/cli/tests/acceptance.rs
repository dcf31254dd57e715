//! Full-resolution acceptance run: one PASS/FAIL line per criterion.

use std::thread;

use filament_cli::config::{ExperimentConfig, Preset};
use filament_cli::output::Manifest;
use filament_cli::runner::{run_preset, RunOptions};
use filament_core::diagnostics::{bound_check, Region};
use filament_core::dynamics::{nonlinear_flow, reduced_nonlinear_flow, run_pair, run_reduced};
use filament_core::exact::{free_gaussian, gaussian_field, mild_difference, shifted_collision_datum};
use filament_core::grid::{forward_dft, free_propagate, inverse_dft};
use filament_core::selfsimilar::{
    reconstruction_heights, reconstruction_residual, residual, solve_fixed_point, HalfLineGrid,
    SelfSimilarProfile, SolveOptions, CONTRACTION_BURN_IN, DEFAULT_NODES, DEFAULT_X_MAX, RECONSTRUCTION_STEP,
};
use filament_core::{Complex64, ComplexField, FilamentPair, PeriodicGrid, Scheme, SplittingConfig};

struct Report {
    lines: Vec<(usize, bool, String)>,
}

impl Report {
    fn record(&mut self, criterion: usize, pass: bool, detail: String) {
        println!("criterion {criterion:2}: {} | {detail}", if pass { "PASS" } else { "FAIL" });
        self.lines.push((criterion, pass, detail));
    }
}

fn run(preset: Preset, overrides: &[&str]) -> Manifest {
    let mut config = ExperimentConfig::preset(preset, false);
    for o in overrides {
        config.apply_override(o).unwrap();
    }
    run_preset(&config, &RunOptions::default())
        .unwrap_or_else(|e| panic!("{preset}: {e}"))
        .manifest
}

fn t_star(m: &Manifest) -> Option<f64> {
    m.collision.as_ref().map(|c| c.t_star)
}

fn in_window(t: Option<f64>, lo: f64, hi: f64) -> bool {
    t.is_some_and(|t| (lo..=hi).contains(&t))
}

fn max_diff(a: &ComplexField, b: &ComplexField) -> f64 {
    a.zip_with(b, |x, y| x - y).max_abs()
}

fn exact_collision(report: &mut Report) {
    let at_origin = mild_difference(1.0, 0.0).norm();
    let grid = PeriodicGrid::new(10.0, 1024).unwrap();
    let diff = ComplexField::from_fn(&grid, |s| mild_difference(1.0, s));
    let j0 = grid.nearest_node(0.0);
    let at_node = diff.values()[j0].norm();
    let sampled_min = diff.values().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    report.record(
        1,
        at_origin < 1e-12 && at_node < 1e-6 && sampled_min == at_node,
        format!("|mild difference(1,0)| = {at_origin:.2e}, sampled min {sampled_min:.2e} at sigma = {}", grid.nodes()[j0]),
    );
}

fn self_similar(alpha: f64) -> (bool, String) {
    let a = Complex64::new(alpha, 0.0);
    let grid = HalfLineGrid::for_alpha(a, DEFAULT_X_MAX, DEFAULT_NODES).unwrap();
    let p: SelfSimilarProfile = match solve_fixed_point(a, SolveOptions::default(), &grid) {
        Ok(p) => p,
        Err(e) => return (false, format!("alpha = {alpha}: {e}")),
    };
    let rho = p.contraction_ratio(CONTRACTION_BURN_IN);
    let (r1, r2) = residual(&p);
    let e_norm = p.e_norm();
    let bound = p.grid.nodes().iter().zip(&p.u).all(|(&x, u)| u.re >= 1.0 + x * alpha / 2.0);
    let corner = p.u[0] == Complex64::new(1.0, 0.0) && p.v[0] == Complex64::new(1.0, 0.0);
    let recon = reconstruction_residual(&p, 1.0, reconstruction_heights(), RECONSTRUCTION_STEP).unwrap_or(f64::INFINITY);
    let pass = rho < 1.0 && r1 < 1e-5 && r2 < 1e-5 && e_norm <= alpha / 4.0 && bound && corner && recon < 1e-4;
    (
        pass,
        format!(
            "alpha = {alpha}: {} iterations, contraction {rho:.2e}, residuals {r1:.1e}/{r2:.1e}, |.|_E = {e_norm:.3} <= {}, Re bound {bound}, u(0)=v(0)=1 {corner}, reconstruction {recon:.1e}",
            p.iterations,
            alpha / 4.0
        ),
    )
}

fn property_suite() -> (bool, String) {
    let grid = PeriodicGrid::new(3.0, 64).unwrap();
    let u = ComplexField::from_fn(&grid, |s| Complex64::new((2.0 * s).sin() + 0.3 * s.cos().powi(3), (s * s / 4.0).cos() - 0.5));
    let round_trip = max_diff(&u, &inverse_dft(&forward_dft(&u)));
    let once = free_propagate(&u, 0.7, 1.0);
    let twice = free_propagate(&free_propagate(&u, 0.3, 1.0), 0.4, 1.0);
    let group = max_diff(&once, &twice);
    let unitarity = (once.l2_norm() - u.l2_norm()).abs();

    let psi2 = u.map(|z| z - Complex64::new(1.5, 0.5));
    let pair = FilamentPair::new(u.clone(), psi2, 1.0, -1.0);
    let moved = nonlinear_flow(&pair, 0.4, 1e-3).unwrap();
    let difference = max_diff(&moved.difference(), &pair.difference());

    let positive = u.map(|z| Complex64::new(z.re.abs() + 0.2, z.im));
    let reduced = reduced_nonlinear_flow(&positive, 0.4, 1e-3).unwrap();
    let real_part = reduced.values().iter().zip(positive.values()).all(|(a, b)| a.re == b.re);

    let big = PeriodicGrid::new(10.0, 256).unwrap();
    let u0 = ComplexField::from_fn(&big, |s| Complex64::new(0.3 * (-(s - 1.0).powi(2)).exp(), -0.2 * (-s * s / 2.0).exp()));
    let shifted = run_pair(shifted_collision_datum(&u0), &SplittingConfig::new(Scheme::Strang, 2e-3, 0.9)).unwrap();
    let exact = ComplexField::from_fn(&big, |s| 2.0 * (1.0 - free_gaussian(0.9, s)));
    let shift = max_diff(&shifted.snapshots.last().unwrap().state.difference(), &exact);

    let even_grid = PeriodicGrid::new(10.0, 128).unwrap();
    let psi = gaussian_field(&even_grid).map(|g| 0.9 - g);
    let traj = run_reduced(psi, &SplittingConfig::new(Scheme::Strang, 1e-2, 0.2)).unwrap();
    let v = traj.snapshots.last().unwrap().state.values().to_vec();
    let evenness = (1..v.len()).map(|j| (v[j] - v[v.len() - j]).norm()).fold(0.0, f64::max);

    let c = bound_check(&Region {
        s: (0.5, 1.5),
        sigma: (-0.2, 0.2),
        s_points: 201,
        sigma_points: 201,
    });

    let pass = round_trip < 1e-12
        && group < 1e-11
        && unitarity < 1e-12
        && difference < 1e-13
        && real_part
        && shift < 1e-10
        && evenness < 1e-11
        && c <= 2.5;
    (
        pass,
        format!(
            "round trip {round_trip:.1e}, group law {group:.1e}, unitarity {unitarity:.1e}, difference {difference:.1e}, real part kept {real_part}, shifted datum {shift:.1e}, evenness {evenness:.1e}, bound C = {c:.4}"
        ),
    )
}

fn main() {
    let (opposite, same_nosym, same_sym, reduced_full, reduced_06, convergence, mild, ss, props) = thread::scope(|s| {
        let opposite = s.spawn(|| run(Preset::Opposite, &[]));
        let same_nosym = s.spawn(|| run(Preset::SameNosym, &[]));
        let same_sym = s.spawn(|| run(Preset::SameSym, &[]));
        let reduced_full = s.spawn(|| run(Preset::ReducedFull, &[]));
        let reduced_06 = s.spawn(|| run(Preset::Reduced06, &[]));
        let convergence = s.spawn(|| run(Preset::Convergence, &[]));
        let mild = s.spawn(|| run(Preset::MildOracle, &[]));
        let ss = s.spawn(|| [self_similar(20.0), self_similar(51.0)]);
        let props = s.spawn(property_suite);
        (
            opposite.join().unwrap(),
            same_nosym.join().unwrap(),
            same_sym.join().unwrap(),
            reduced_full.join().unwrap(),
            reduced_06.join().unwrap(),
            convergence.join().unwrap(),
            mild.join().unwrap(),
            ss.join().unwrap(),
            props.join().unwrap(),
        )
    });

    let mut report = Report { lines: Vec::new() };
    exact_collision(&mut report);

    let dx = 20.0 / 1024.0;
    let sigma = opposite.collision.as_ref().map(|c| c.sigma_star);
    report.record(
        2,
        in_window(t_star(&opposite), 0.98, 1.02) && sigma.is_some_and(|s| s.abs() <= dx),
        format!("opposite: t* = {:?}, sigma* = {sigma:?} (grid spacing {dx})", t_star(&opposite)),
    );

    report.record(
        3,
        in_window(t_star(&same_nosym), 2.5, 2.8),
        format!("same_nosym: t* = {:?}", t_star(&same_nosym)),
    );

    let gap = t_star(&same_sym).zip(t_star(&reduced_full)).map(|(a, b)| (a - b).abs());
    let defect = same_sym.invariants.symmetry_defect.unwrap_or(f64::INFINITY);
    report.record(
        4,
        in_window(t_star(&same_sym), 0.78, 0.88) && gap.is_some_and(|g| g <= 0.02) && defect <= 1e-10,
        format!(
            "same_sym: t* = {:?}, reduced t* = {:?}, gap {gap:?}, symmetry defect {defect:.1e}",
            t_star(&same_sym),
            t_star(&reduced_full)
        ),
    );

    let twin = reduced_06.collision.as_ref().is_some_and(|c| c.twin);
    report.record(
        5,
        in_window(t_star(&reduced_06), 0.14, 0.22) && twin,
        format!(
            "reduced_06: t* = {:?}, twin {twin}, minima at {:?}",
            t_star(&reduced_06),
            reduced_06.collision.as_ref().and_then(|c| c.twin_sigmas)
        ),
    );

    let drift = opposite.invariants.conserved_difference_drift.unwrap_or(f64::INFINITY);
    report.record(6, drift < 1e-10, format!("opposite: relative drift of |psi1 - psi2 - 2| = {drift:.2e}"));

    let conv = convergence.convergence.as_ref().unwrap();
    let lie = conv.lie_order.unwrap_or(f64::NAN);
    let strang = conv.strang_order.unwrap_or(f64::NAN);
    let taus: Vec<f64> = conv.members.iter().filter(|m| m.scheme == Scheme::Lie).map(|m| m.tau).collect();
    report.record(
        7,
        (lie - 1.0).abs() <= 0.2 && (strang - 2.0).abs() <= 0.2,
        format!("t = {}: Lie order {lie:.4}, Strang order {strang:.4}, tau = {taus:?}", conv.time),
    );

    let d = mild.duhamel.as_ref().unwrap();
    let affine = d.growth.iter().all(|g| g[1] <= d.growth_constant * (1.0 + g[0]) * (1.0 + 1e-12))
        && d.growth_constant.is_finite()
        && d.growth.last().is_some_and(|g| g[0] >= 3.0 - 1e-9);
    report.record(
        8,
        d.norm_at_zero == 0.0 && d.self_convergence < 1e-4 && (d.self_convergence_time - 2.0).abs() < 1e-9 && affine,
        format!(
            "|D(0)| = {:.1e}, self-convergence {:.2e} at t = {}, |D(t)| <= {:.4}(1+t) on [0, 3], ratio non-increasing after collision {}",
            d.norm_at_zero, d.self_convergence, d.self_convergence_time, d.growth_constant, d.ratio_nonincreasing_after_collision
        ),
    );

    let [(p20, s20), (p51, s51)] = ss;
    report.record(9, p20 && p51, format!("{s20}; {s51}"));

    report.record(10, props.0, props.1);

    let failed: Vec<usize> = report.lines.iter().filter(|l| !l.1).map(|l| l.0).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", report.lines.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}

