use std::f64::consts::PI;

use mirrorlang_core::noise::{self, NoiseGenerator, NoiseSpec};
use mirrorlang_core::{ExecPolicy, TimeGrid};

fn mean_se(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

fn assert_within_se(
    name: &str,
    est: &noise::AutocovEstimate,
    target: impl Fn(f64) -> f64,
    lags: &[usize],
) {
    for &k in lags {
        let tau = est.lags()[k];
        let (got, want, se) = (est.value(k), target(tau), est.se[k]);
        assert!(
            (got - want).abs() <= 3.0 * se,
            "{name}: lag {tau}: {got} vs {want} (se {se})"
        );
    }
}

#[test]
fn white_noise_lag_zero_variance_is_strength_over_dt() {
    let grid = TimeGrid::new(0.0, 0.01, 2000).unwrap();
    let spec = NoiseSpec::White { strength: 4.0 };
    let generator = NoiseGenerator::new(spec, grid).unwrap();
    let est =
        noise::ensemble_autocovariance(&generator, 500, 11, 5, ExecPolicy::default()).unwrap();
    assert_within_se(
        "white",
        &est,
        |t| spec.autocovariance(t, grid.dt()),
        &[0, 1, 2, 5],
    );
    assert!((est.value(0) / 400.0 - 1.0).abs() < 0.01);
}

#[test]
fn ou_autocovariance_at_one_correlation_time() {
    let corr = 0.5;
    let grid = TimeGrid::new(0.0, corr / 10.0, 4000).unwrap();
    let spec = NoiseSpec::ThermalOU {
        corr_time: corr,
        variance: 2.0,
    };
    let generator = NoiseGenerator::new(spec, grid).unwrap();
    let est =
        noise::ensemble_autocovariance(&generator, 1000, 5, 30, ExecPolicy::default()).unwrap();
    assert_within_se(
        "ou",
        &est,
        |t| spec.autocovariance(t, grid.dt()),
        &[0, 10, 20, 30],
    );
    assert!((est.value(10) / (2.0 * (-1.0f64).exp()) - 1.0).abs() < 0.05);
}

#[test]
fn vacuum_autocovariance_follows_continuum_kernel() {
    let grid = TimeGrid::new(0.0, 0.05, 2048).unwrap();
    let spec = NoiseSpec::VacuumColored {
        area: 720.0 * PI * PI,
        cutoff: 5.0,
    };
    let generator = NoiseGenerator::new(spec, grid).unwrap();
    let est =
        noise::ensemble_autocovariance(&generator, 2000, 3, 40, ExecPolicy::default()).unwrap();
    let lags: Vec<usize> = (0..=10).map(|k| 4 * k).collect();
    assert_within_se("vacuum", &est, |t| spec.autocovariance(t, grid.dt()), &lags);
}

#[test]
fn vacuum_periodogram_recovers_fifth_power_spectrum() {
    let grid = TimeGrid::new(0.0, 0.05, 4096).unwrap();
    let spec = NoiseSpec::VacuumColored {
        area: 720.0 * PI * PI,
        cutoff: 5.0,
    };
    let generator = NoiseGenerator::new(spec, grid).unwrap();
    let omega = 2.0;
    let values: Vec<f64> = (0..4000)
        .map(|i| noise::periodogram(&generator.sample(noise::path_seed(21, i)).unwrap(), omega))
        .collect();
    let (m, se) = mean_se(&values);
    let target = spec.spectrum(omega);
    assert!((target - 32.0).abs() < 1e-12);
    assert!((m - target).abs() < 3.0 * se, "{m} vs {target} (se {se})");
    assert!((m / target - 1.0).abs() < 0.05, "{m} vs {target}");
}

#[test]
fn vacuum_noise_is_gaussian() {
    let grid = TimeGrid::new(0.0, 0.05, 1024).unwrap();
    let spec = NoiseSpec::VacuumColored {
        area: 720.0 * PI * PI,
        cutoff: 5.0,
    };
    let generator = NoiseGenerator::new(spec, grid).unwrap();
    // One sample per path at a fixed time keeps the draws independent.
    let x: Vec<f64> = (0..20000)
        .map(|i| generator.sample(noise::path_seed(8, i)).unwrap().values[500])
        .collect();
    let n = x.len() as f64;
    let m2 = x.iter().map(|v| v * v).sum::<f64>() / n;
    let m4 = x.iter().map(|v| v.powi(4)).sum::<f64>() / n;
    let excess = m4 / (m2 * m2) - 3.0;
    let se = (24.0 / n).sqrt();
    assert!(
        excess.abs() < 3.0 * se,
        "excess kurtosis {excess} (se {se})"
    );
}

#[test]
fn noise_is_stationary_across_the_grid() {
    let grid = TimeGrid::new(0.0, 0.05, 2000).unwrap();
    let spec = NoiseSpec::VacuumColored {
        area: 720.0 * PI * PI,
        cutoff: 5.0,
    };
    let generator = NoiseGenerator::new(spec, grid).unwrap();
    let diffs: Vec<f64> = (0..1000)
        .map(|i| {
            let p = generator.sample(noise::path_seed(4, i)).unwrap();
            let (a, b) = p.values.split_at(1000);
            a.iter().map(|v| v * v).sum::<f64>() / 1000.0
                - b.iter().map(|v| v * v).sum::<f64>() / 1000.0
        })
        .collect();
    let (m, se) = mean_se(&diffs);
    assert!(m.abs() < 3.0 * se, "{m} (se {se})");
}

#[test]
fn vacuum_power_stays_below_cutoff() {
    let grid = TimeGrid::new(0.0, 0.05, 8192).unwrap();
    let spec = NoiseSpec::VacuumColored {
        area: 1.0,
        cutoff: 5.0,
    };
    let generator = NoiseGenerator::new(spec, grid).unwrap();
    for seed in 0..5 {
        let frac = noise::power_fraction_above(&generator.sample(seed).unwrap(), 5.0);
        assert!(frac < 0.01, "seed {seed}: {frac}");
    }
}

#[test]
fn ensemble_estimate_is_identical_across_policies() {
    let grid = TimeGrid::new(0.0, 0.05, 512).unwrap();
    let spec = NoiseSpec::VacuumColored {
        area: 3.0,
        cutoff: 5.0,
    };
    let generator = NoiseGenerator::new(spec, grid).unwrap();
    let seq =
        noise::ensemble_autocovariance(&generator, 64, 9, 20, ExecPolicy::Sequential).unwrap();
    for threads in [None, Some(1), Some(3)] {
        let par =
            noise::ensemble_autocovariance(&generator, 64, 9, 20, ExecPolicy::Parallel { threads })
                .unwrap();
        assert_eq!(seq, par);
    }
}

#[test]
fn streamed_and_stored_estimates_agree() {
    let grid = TimeGrid::new(0.0, 0.1, 300).unwrap();
    let spec = NoiseSpec::ThermalOU {
        corr_time: 1.0,
        variance: 1.0,
    };
    let generator = NoiseGenerator::new(spec, grid).unwrap();
    let paths: Vec<_> = (0..20)
        .map(|i| generator.sample(noise::path_seed(1, i)).unwrap())
        .collect();
    let stored = noise::autocovariance_estimate(&paths, 10).unwrap();
    let streamed =
        noise::ensemble_autocovariance(&generator, 20, 1, 10, ExecPolicy::Sequential).unwrap();
    assert_eq!(stored, streamed);
}
