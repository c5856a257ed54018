use std::f64::consts::PI;

use mirrorlang_core::dynamics::LangevinMode;
use mirrorlang_core::kernels::GammaMode;
use mirrorlang_core::observables::{self, ensemble_run, EnsembleConfig};
use mirrorlang_core::{ReducedParams, TimeGrid};

#[test]
fn standard_error_shrinks_as_inverse_square_root_of_paths() {
    let p = ReducedParams::new(1e-3, 5.0, 0.0, 1e-3).unwrap();
    let grid = TimeGrid::span(40.0, 0.05).unwrap();
    let run = |n| {
        ensemble_run(&EnsembleConfig::new(p, grid, LangevinMode::Vacuum, n, 77).unwrap()).unwrap()
    };
    let small = run(500);
    let large = run(1000);
    let bins = (grid.len() / 2)..grid.len();
    let ratio = bins
        .clone()
        .map(|j| (small.se_mean_q[j] / large.se_mean_q[j]).powi(2))
        .sum::<f64>()
        / bins.len() as f64;
    assert!((ratio - 2.0).abs() < 0.3, "{ratio}");
}

#[test]
fn literal_damping_settles_at_half_the_temperature() {
    let p = ReducedParams::new(1e-3, 5.0, 0.2, 1e-3).unwrap();
    let grid = TimeGrid::span(40.0, 0.02).unwrap();
    let mut cfg = EnsembleConfig::new(p, grid, LangevinMode::ThermalWhite, 10_000, 5).unwrap();
    cfg.langevin = cfg.langevin.with_gamma_mode(GammaMode::Literal);
    let stats = ensemble_run(&cfg).unwrap();
    let report =
        observables::equipartition_check(&stats, &p, GammaMode::Literal, None, 0.02).unwrap();
    assert!(
        (report.measured / (0.5 * p.theta_t) - 1.0).abs() < 0.02,
        "{report:?}"
    );
    assert!(!report.pass);
}

#[test]
fn thermal_white_heating_rate_is_half_the_strength() {
    let p = ReducedParams::new(1e-3, 5.0, 0.2, 1e-3).unwrap();
    let grid = TimeGrid::span(100.0, 0.05).unwrap();
    let mut cfg = EnsembleConfig::new(p, grid, LangevinMode::ThermalWhite, 10_000, 19).unwrap();
    cfg.langevin = cfg.langevin.without_backreaction();
    let stats = ensemble_run(&cfg).unwrap();
    let slope =
        observables::variance_slope(&stats, observables::default_heating_window(&p)).unwrap();
    let target = observables::thermal_heating_slope(&p.sim_physical()).unwrap();
    assert!(
        (slope.slope / target - 1.0).abs() < 0.05,
        "{slope:?} vs {target}"
    );
    assert!(
        (slope.slope - target).abs() < 3.0 * slope.se,
        "{slope:?} vs {target}"
    );
}

#[test]
fn simulated_energy_gain_per_cycle_matches_closed_form() {
    let p = ReducedParams::new(1e-3, 5.0, 0.0, 1e-3).unwrap();
    let grid = TimeGrid::span(100.0, 0.02).unwrap();
    let mut cfg = EnsembleConfig::new(p, grid, LangevinMode::Vacuum, 10_000, 23).unwrap();
    cfg.langevin = cfg.langevin.without_backreaction().with_switch_on(5.0);
    let stats = ensemble_run(&cfg).unwrap();
    let slope = observables::variance_slope(&stats, (10.0, 100.0)).unwrap();
    let measured = 0.5 * slope.slope * 2.0 * PI;
    let target = observables::energy_gain_per_cycle(&p.sim_physical());
    assert!(
        (measured / target - 1.0).abs() < 0.05,
        "{measured} vs {target}"
    );
}
