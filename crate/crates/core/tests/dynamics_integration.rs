use mirrorlang_core::dynamics::{self, LangevinMode, LangevinOptions, Method};
use mirrorlang_core::noise::{self, NoisePath, NoiseSpec};
use mirrorlang_core::observables::{ensemble_run, EnsembleConfig};
use mirrorlang_core::{Error, ReducedParams, TimeGrid};

fn vacuum_params(lambda: f64) -> ReducedParams {
    ReducedParams::new(1e-3, lambda, 0.0, 1e-3).unwrap()
}

fn noise_free(params: &ReducedParams, grid: TimeGrid) -> dynamics::Trajectory {
    let ic = (params.amp0, 0.0);
    dynamics::langevin_integrate(
        params,
        grid,
        &NoisePath::zeros(grid),
        ic,
        &LangevinOptions::new(LangevinMode::Vacuum),
    )
    .unwrap()
}

#[test]
fn noise_free_decay_matches_envelope_rate() {
    let p = vacuum_params(5.0);
    let traj = noise_free(&p, TimeGrid::span(3000.0, 0.05).unwrap());
    let fit = dynamics::secular_fit(&traj).unwrap();
    let env = dynamics::rg_envelope(&p).unwrap();
    assert!(
        (fit.decay_rate / env.decay_rate - 1.0).abs() < 0.01,
        "{fit:?}"
    );
    assert!(fit.decay_se < 1e-3 * env.decay_rate);
}

#[test]
fn oracle_without_stiffness_term_decays_at_gamma() {
    let p = vacuum_params(0.0);
    let traj =
        dynamics::mean_evolution_perturbative(&p, TimeGrid::span(300.0, 0.01).unwrap()).unwrap();
    assert_eq!(traj.method, Method::Perturbative);
    let c = dynamics::perturbative_secular_coefficients(&traj).unwrap();
    assert!((c.decay_rate / 1e-3 - 1.0).abs() < 0.01, "{c:?}");
    assert!(c.freq_shift.abs() < 1e-2 * 1e-3, "{c:?}");
}

#[test]
fn frequency_shift_is_half_the_envelope_value() {
    let p = vacuum_params(10.0);
    let oracle = dynamics::perturbative_secular_coefficients(
        &dynamics::mean_evolution_perturbative(&p, TimeGrid::span(300.0, 0.01).unwrap()).unwrap(),
    )
    .unwrap();
    let fit =
        dynamics::secular_fit(&noise_free(&p, TimeGrid::span(3000.0, 0.05).unwrap())).unwrap();
    let env = dynamics::rg_envelope(&p).unwrap();
    assert!(
        (oracle.freq_shift / fit.freq_shift - 1.0).abs() < 0.01,
        "{oracle:?} {fit:?}"
    );
    assert!((fit.freq_shift / env.freq_shift_envelope - 0.5).abs() < 0.01);
}

#[test]
fn free_oscillation_fit_recovers_zero_rates() {
    let p = ReducedParams::new(0.0, 0.0, 0.0, 1.0).unwrap();
    let fit = dynamics::secular_fit(&noise_free(&p, TimeGrid::span(400.0, 0.05).unwrap())).unwrap();
    assert!(
        fit.decay_rate.abs() <= 3.0 * fit.decay_se + 1e-10,
        "{fit:?}"
    );
    assert!(
        fit.freq_shift.abs() <= 3.0 * fit.shift_se + 1e-10,
        "{fit:?}"
    );
}

#[test]
fn ensemble_mean_follows_noise_free_motion() {
    let p = ReducedParams::new(2e-3, 5.0, 0.0, 1.0).unwrap();
    let grid = TimeGrid::span(200.0, 0.05).unwrap();
    let mut cfg = EnsembleConfig::new(p, grid, LangevinMode::Vacuum, 400, 17).unwrap();
    cfg.ic = (1.0, 0.0);
    let stats = ensemble_run(&cfg).unwrap();
    let exact = dynamics::harmonic_exact(&p, grid, cfg.ic, &cfg.langevin).unwrap();
    for j in (0..grid.len()).step_by(397) {
        let d = (stats.mean_q[j] - exact.q[j]).abs();
        assert!(
            d <= 3.0 * stats.se_mean_q[j] + 1e-9,
            "t = {}: {d} (se {})",
            grid.time(j),
            stats.se_mean_q[j]
        );
    }
}

#[test]
fn trajectories_are_covariant_under_time_shift() {
    let p = ReducedParams::new(1e-3, 2.0, 0.2, 1e-3).unwrap();
    let grid = TimeGrid::new(0.0, 0.02, 5000).unwrap();
    let shifted = grid.shifted(37.5);
    let opts = LangevinOptions::new(LangevinMode::Vacuum);
    let a = dynamics::langevin_integrate(&p, grid, &NoisePath::zeros(grid), (1e-3, 2e-4), &opts)
        .unwrap();
    let b =
        dynamics::langevin_integrate(&p, shifted, &NoisePath::zeros(shifted), (1e-3, 2e-4), &opts)
            .unwrap();
    assert_eq!(a.q, b.q);
    assert_eq!(a.v, b.v);

    let white = LangevinOptions::new(LangevinMode::ThermalWhite);
    let spec = NoiseSpec::white(&p).unwrap();
    let na = noise::synthesize(spec, grid, 3).unwrap();
    let nb = noise::synthesize(spec, shifted, 3).unwrap();
    let a = dynamics::langevin_integrate(&p, grid, &na, (0.0, 0.0), &white).unwrap();
    let b = dynamics::langevin_integrate(&p, shifted, &nb, (0.0, 0.0), &white).unwrap();
    assert_eq!(a.v, b.v);
}

#[test]
fn thermal_velocity_variance_forgets_initial_conditions() {
    let p = ReducedParams::new(1e-3, 5.0, 0.2, 1e-3).unwrap();
    let grid = TimeGrid::span(60.0, 0.02).unwrap();
    let run = |ic: (f64, f64), seed: u64| {
        let mut cfg = EnsembleConfig::new(p, grid, LangevinMode::ThermalWhite, 2000, seed).unwrap();
        cfg.ic = ic;
        ensemble_run(&cfg).unwrap()
    };
    let a = run((0.0, 0.0), 1);
    let b = run((0.5, -0.3), 2);
    let last = grid.len() - 1;
    let d = a.var_v[last] - b.var_v[last];
    let se = a.se_var_v[last].hypot(b.se_var_v[last]);
    assert!(d.abs() < 3.0 * se, "{d} (se {se})");
    assert!(b.mean_q[last].abs() < 3.0 * b.se_mean_q[last] + 1e-3);
}

#[test]
fn mismatched_noise_grid_is_rejected() {
    let p = vacuum_params(1.0);
    let grid = TimeGrid::span(10.0, 0.05).unwrap();
    let other = TimeGrid::span(10.0, 0.04).unwrap();
    let err = dynamics::langevin_integrate(
        &p,
        grid,
        &NoisePath::zeros(other),
        (0.0, 0.0),
        &LangevinOptions::new(LangevinMode::Vacuum),
    )
    .unwrap_err();
    assert!(matches!(err, Error::GridMismatch(_)));
}

#[test]
fn switch_on_ramp_suppresses_the_initial_kick() {
    let p = ReducedParams::new(1e-3, 50.0, 0.0, 1e-3).unwrap();
    let grid = TimeGrid::span(20.0, 0.02).unwrap();
    let spec = NoiseSpec::vacuum(&p);
    let opts = LangevinOptions::new(LangevinMode::Vacuum).without_backreaction();
    let mut hard = 0.0;
    let mut soft = 0.0;
    for i in 0..200 {
        let eta = noise::synthesize(spec, grid, noise::path_seed(5, i)).unwrap();
        let a = dynamics::langevin_integrate(&p, grid, &eta, (0.0, 0.0), &opts).unwrap();
        let b = dynamics::langevin_integrate(&p, grid, &eta, (0.0, 0.0), &opts.with_switch_on(5.0))
            .unwrap();
        let end = grid.len() - 1;
        hard += a.q[end] * a.q[end];
        soft += b.q[end] * b.q[end];
    }
    assert!(soft < hard);
}
