use std::sync::{Arc, OnceLock};

use filament_core::diagnostics::{bound_check, convergence_order, detect_in_series, Measure, Region};
use filament_core::dynamics::{
    nonlinear_flow, reduced_nonlinear_flow, run_pair, run_reduced, FilamentPair, Scheme, SplittingConfig,
};
use filament_core::exact::{free_gaussian, gaussian_field, shifted_collision_datum};
use filament_core::grid::{forward_dft, free_propagate, inverse_dft, ComplexField, PeriodicGrid};
use filament_core::selfsimilar::{solve_fixed_point, HalfLineGrid, SelfSimilarProfile, SolveOptions};
use num_complex::Complex64;
use proptest::prelude::*;

fn grid64() -> Arc<PeriodicGrid> {
    static GRID: OnceLock<Arc<PeriodicGrid>> = OnceLock::new();
    GRID.get_or_init(|| PeriodicGrid::new(3.0, 64).unwrap()).clone()
}

fn field(values: Vec<(f64, f64)>) -> ComplexField {
    ComplexField::new(grid64(), values.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

fn values() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 64)
}

fn max_diff(a: &ComplexField, b: &ComplexField) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn profile() -> &'static SelfSimilarProfile {
    static PROFILE: OnceLock<SelfSimilarProfile> = OnceLock::new();
    PROFILE.get_or_init(|| {
        let grid = HalfLineGrid::new(20.0, 4097, 20.0).unwrap();
        solve_fixed_point(Complex64::new(20.0, 0.0), SolveOptions::default(), &grid).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectral_round_trip(v in values()) {
        let u = field(v);
        let back = inverse_dft(&forward_dft(&u));
        prop_assert!(max_diff(&u, &back) < 1e-12 * (1.0 + u.max_abs()));
    }

    #[test]
    fn propagator_is_unitary_and_a_group(v in values(), t1 in -2.0..2.0f64, t2 in -2.0..2.0f64, sign in prop::sample::select(vec![1.0, -1.0])) {
        let u = field(v);
        let once = free_propagate(&u, t1 + t2, sign);
        let twice = free_propagate(&free_propagate(&u, t1, sign), t2, sign);
        prop_assert!(max_diff(&once, &twice) < 1e-11 * (1.0 + u.max_abs()));
        prop_assert!((once.l2_norm() - u.l2_norm()).abs() < 1e-12 * (1.0 + u.l2_norm()));
    }

    #[test]
    fn nonlinear_flow_keeps_the_difference(
        v in values(),
        t in -0.5..0.5f64,
        alphas in prop::sample::select(vec![(1.0, -1.0), (1.0, 1.0)]),
    ) {
        let psi1 = field(v);
        // separation at least 1 everywhere
        let psi2 = psi1.map(|z| z - Complex64::new(1.5, 0.5));
        let pair = FilamentPair::new(psi1, psi2, alphas.0, alphas.1);
        let out = nonlinear_flow(&pair, t, 1e-3).unwrap();
        let moved = out.psi1.zip_with(&pair.psi1, |a, b| a - b).max_abs();
        prop_assert!(max_diff(&out.difference(), &pair.difference()) < 1e-14 * (1.0 + moved) * 8.0);
        prop_assert!(max_diff(&out.psi1.zip_with(&pair.psi1, |a, b| a - b), &out.psi2.zip_with(&pair.psi2, |a, b| a - b)) < 1e-14 * (5.0 + moved));
    }

    #[test]
    fn reduced_flow_keeps_the_real_part(v in values(), t in -0.5..0.5f64) {
        let psi = field(v.into_iter().map(|(a, b)| (a.abs() + 0.2, b)).collect());
        let out = reduced_nonlinear_flow(&psi, t, 1e-3).unwrap();
        for (a, b) in out.values().iter().zip(psi.values()) {
            prop_assert_eq!(a.re, b.re);
        }
    }

    #[test]
    fn bound_constant_near_the_singularity(
        s0 in 0.5..1.4f64, ds in 0.01..0.1f64,
        x0 in -0.2..0.15f64, dx in 0.01..0.05f64,
    ) {
        let region = Region { s: (s0, s0 + ds), sigma: (x0, x0 + dx), s_points: 17, sigma_points: 17 };
        prop_assert!(bound_check(&region) <= 2.5);
    }

    #[test]
    fn larger_threshold_never_detects_later(
        series in prop::collection::vec(0.0..1.0f64, 3..40),
        a in 0.0..1.0f64, b in 0.0..1.0f64,
    ) {
        let times: Vec<f64> = (0..series.len()).map(|i| i as f64 * 0.1).collect();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        for measure in [Measure::Modulus, Measure::RealPart] {
            let small = detect_in_series(&times, &series, lo, measure);
            let large = detect_in_series(&times, &series, hi, measure);
            if let Some(s) = small {
                let l = large.expect("a larger threshold is crossed too");
                prop_assert!(l.t_star <= s.t_star, "{l:?} {s:?}");
            }
        }
    }

    #[test]
    fn power_laws_are_recovered(p in 0.5..4.0f64, c in 1e-3..1e3f64, tau0 in 1e-4..1e-1f64) {
        let data: Vec<(f64, f64)> = (0..4).map(|i| {
            let tau = tau0 / 2f64.powi(i);
            (tau, c * tau.powf(p))
        }).collect();
        prop_assert!((convergence_order(&data).unwrap() - p).abs() < 1e-6);
    }

    #[test]
    fn self_similar_filaments_are_even(t in 0.05..3.0f64, sigma in 0.0..25.0f64) {
        let p = profile();
        prop_assert_eq!(p.psi1(t, sigma).unwrap(), p.psi1(t, -sigma).unwrap());
        prop_assert!(p.psi1(t, sigma).unwrap().re >= t.sqrt() * (1.0 + p.alpha.re * sigma / (2.0 * t).sqrt() / 2.0) - 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn shifted_datum_collides_like_the_gaussian(a in -0.5..0.5f64, b in -2.0..2.0f64, c in -0.5..0.5f64) {
        let grid = PeriodicGrid::new(10.0, 256).unwrap();
        let u0 = ComplexField::from_fn(&grid, |s| Complex64::new(a * (-(s - b).powi(2)).exp(), c * (-s * s / 2.0).exp()));
        let config = SplittingConfig::new(Scheme::Strang, 2e-3, 0.9);
        let shifted = run_pair(shifted_collision_datum(&u0), &config).unwrap();
        let last = shifted.snapshots.last().unwrap();
        prop_assert!((last.time - 0.9).abs() < 1e-12);
        let exact = ComplexField::from_fn(&grid, |s| 2.0 * (1.0 - free_gaussian(0.9, s)));
        prop_assert!(max_diff(&last.state.difference(), &exact) < 1e-10);
    }

    #[test]
    fn even_data_stay_even(offset in 0.7..1.2f64) {
        let grid = PeriodicGrid::new(10.0, 128).unwrap();
        let psi = gaussian_field(&grid).map(|g| offset - g);
        let traj = run_reduced(psi, &SplittingConfig::new(Scheme::Strang, 1e-2, 0.2)).unwrap();
        let v = traj.snapshots.last().unwrap().state.values().to_vec();
        let k = v.len();
        for j in 1..k {
            prop_assert!((v[j] - v[k - j]).norm() < 1e-11);
        }
    }
}
