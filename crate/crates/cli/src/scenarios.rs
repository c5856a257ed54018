//! Scenario orchestration. Each scenario resolves its settings (command
//! line over config over defaults), records them in the canonical listing
//! that feeds the config hash, computes, and writes its artifacts from the
//! calling thread.

use std::path::{Path, PathBuf};

use mirrorlang_core::dynamics::{self, LangevinMode, LangevinOptions};
use mirrorlang_core::kernels::{self, Domain, GammaMode, KernelKind, Regime, SigmaThermalVariant};
use mirrorlang_core::noise::{self, NoiseGenerator, NoiseSpec};
use mirrorlang_core::observables::{
    self, EnsembleConfig, EnsembleStats, HeadlineInputs, RelaxRegime,
};
use mirrorlang_core::params::{self, SiInputs};
use mirrorlang_core::{exec, PhysicalParams, ReducedParams, SiConversion, TimeGrid};
use serde_json::json;

use crate::checks;
use crate::config::{self, ConfigError, ConfigErrorKind, ParamBlock, Scenario, ThermalNoise};
use crate::output::{self, Canonical, Check, CsvTable, Summary};
use crate::tolerances::TOLERANCE_VERSION;
use crate::{CliError, Context, DomainArg, FdtRegimeArg, KindArg, NoiseArg, RegimeArg};

/// Parameters used when the config has no parameter block.
pub const DEFAULT_EPSILON: f64 = 1e-3;
pub const DEFAULT_LAMBDA_RATIO: f64 = 5.0;
pub const DEFAULT_THETA_T: f64 = 0.2;

pub const DEFAULT_FDT_POINTS: usize = 10_000;
pub const DEFAULT_NOISE_PATHS: usize = 1000;
pub const DEFAULT_ENSEMBLE_PATHS: usize = 10_000;
pub const DEFAULT_SWITCH_ON: f64 = 5.0;
const PATH_FILE_CHUNK: usize = 64;

pub struct Outcome {
    pub summary: Summary,
    pub summary_path: PathBuf,
}

struct Setup {
    reduced: ReducedParams,
    physical: PhysicalParams,
    canon: Canonical,
}

fn setup(ctx: &Context, scenario: Scenario) -> Result<Setup, CliError> {
    if let Some(s) = ctx.config.scenario.filter(|s| *s != scenario) {
        return Err(CliError::Usage(format!(
            "config is for scenario `{s}`, not `{scenario}`"
        )));
    }
    let mut canon = Canonical::default();
    canon.set("scenario", scenario);
    for (name, value) in &ctx.tol_overrides {
        canon.set_f64(&format!("tol.{name}"), *value);
    }
    let lambda = ctx.config.lambda_ratio.unwrap_or(DEFAULT_LAMBDA_RATIO);
    let (reduced, physical) = match ctx.config.params {
        None => {
            let r = ReducedParams::new(
                DEFAULT_EPSILON,
                lambda,
                DEFAULT_THETA_T,
                params::DEFAULT_AMP0,
            )?;
            (r, r.sim_physical())
        }
        Some(ParamBlock::Reduced(b)) => {
            let r =
                ReducedParams::new(b.epsilon, lambda, b.theta_t, b.amp0)?.with_phase(b.phase0)?;
            (r, r.sim_physical())
        }
        Some(ParamBlock::Physical(b)) => {
            canon.set_f64("m_kg", b.m_kg);
            canon.set_f64("area_cm2", b.area_cm2);
            canon.set_f64("omega0_per_s", b.omega0_per_s);
            canon.set_f64("T_keV", b.t_kev);
            if let Some(l0) = b.l0_cm {
                canon.set_f64("l0_cm", l0);
            }
            if let Some(theta0) = b.theta0_s {
                canon.set_f64("theta0_s", theta0);
            }
            let p = SiInputs {
                m_kg: b.m_kg,
                area_cm2: b.area_cm2,
                omega0_per_s: b.omega0_per_s,
                lambda_ratio: lambda,
                t_kev: b.t_kev,
                l0_cm: b.l0_cm,
                theta0_s: b.theta0_s,
            }
            .to_params()?;
            (params::reduce(&p)?, p)
        }
    };
    canon.set_f64("epsilon", reduced.epsilon);
    canon.set_f64("lambda_ratio", reduced.lambda);
    canon.set_f64("theta_t", reduced.theta_t);
    canon.set_f64("amp0", reduced.amp0);
    canon.set_f64("phase0", reduced.phase0);
    Ok(Setup {
        reduced,
        physical,
        canon,
    })
}

fn missing(key: &str) -> CliError {
    CliError::Config(ConfigError {
        line: 0,
        kind: ConfigErrorKind::MissingRequired(key.to_string()),
    })
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("{name} must be positive, got {v}")))
    }
}

fn path_count(v: usize) -> Result<usize, CliError> {
    if v >= 2 {
        Ok(v)
    } else {
        Err(CliError::Usage(format!(
            "n_paths must be at least 2, got {v}"
        )))
    }
}

fn out_dir(ctx: &Context, scenario: Scenario) -> PathBuf {
    ctx.out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("mirrorlang-{scenario}")))
}

fn out_file(ctx: &Context, default: &str) -> PathBuf {
    ctx.out.clone().unwrap_or_else(|| PathBuf::from(default))
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn finish(
    scenario: Scenario,
    canon: &Canonical,
    seed: Option<u64>,
    checks: Vec<Check>,
    results: serde_json::Value,
    artifacts: Vec<String>,
    summary_path: PathBuf,
) -> Result<Outcome, CliError> {
    let summary = Summary {
        tool: "mirrorlang",
        version: output::VERSION,
        scenario: scenario.to_string(),
        config_hash: canon.hash(),
        master_seed: seed,
        tolerance_version: TOLERANCE_VERSION,
        pass: checks.iter().all(|c| c.pass),
        checks,
        results,
        artifacts,
    };
    output::write_json(&summary_path, &summary)?;
    Ok(Outcome {
        summary,
        summary_path,
    })
}

fn parse_grid(spec: &str) -> Result<(f64, f64, usize), CliError> {
    let bad = || CliError::Usage(format!("--grid expects MIN:MAX:N, got `{spec}`"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let min: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let max: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    Ok((min, max, n))
}

pub fn kernels(
    ctx: &Context,
    domain: DomainArg,
    grid: Option<&str>,
    kind: KindArg,
    regime: RegimeArg,
) -> Result<Outcome, CliError> {
    let Setup {
        physical: p,
        mut canon,
        ..
    } = setup(ctx, Scenario::Kernels)?;
    let gamma_mode = ctx.config.gamma_mode.unwrap_or_default();
    let variant = ctx.config.sigma_variant.unwrap_or_default();
    let (domain, domain_name) = match domain {
        DomainArg::Time => (Domain::Time, "time"),
        DomainArg::Freq => (Domain::Frequency, "freq"),
    };
    let (kind, kind_name) = match kind {
        KindArg::Chi => (KernelKind::ChiFF, "chi"),
        KindArg::Sigma => (KernelKind::SigmaFF, "sigma"),
    };
    let (regime, regime_name) = match regime {
        RegimeArg::Vacuum => (Regime::Vacuum, "vacuum"),
        RegimeArg::Thermal => (Regime::Thermal, "thermal"),
    };
    let (min, max, n) = match grid {
        Some(g) => parse_grid(g)?,
        None => match (domain, regime) {
            (Domain::Frequency, _) => (0.0, p.cutoff(), 1001),
            (Domain::Time, Regime::Vacuum) => (0.0, 10.0 / p.cutoff(), 1001),
            (Domain::Time, Regime::Thermal) => (0.0, 2.5 * p.tau_b()?, 1001),
        },
    };
    canon.set("domain", domain_name);
    canon.set("kind", kind_name);
    canon.set("regime", regime_name);
    canon.set(
        "grid",
        format!("{}:{}:{n}", output::fmt_f64(min), output::fmt_f64(max)),
    );
    canon.set("gamma_mode", config::gamma_mode_name(gamma_mode));
    canon.set("sigma_variant", config::sigma_variant_name(variant));
    let values = kernels::uniform_grid(min, max, n)?;
    let sampled = kernels::sample_kernel(domain, kind, regime, values, &p, gamma_mode, variant)?;
    let mut table = CsvTable::new(&["grid_value", "re", "im"]);
    for (x, v) in sampled.grid().iter().zip(sampled.values()) {
        table.push(vec![*x, v.re, v.im]);
    }
    let hash = canon.hash();
    let csv_path = out_file(ctx, "kernels.csv");
    output::write_csv(&csv_path, &table, &hash)?;
    let stem = csv_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let summary_path = csv_path.with_file_name(format!("{stem}.summary.json"));
    let results = json!({
        "domain": domain_name,
        "kind": kind_name,
        "regime": regime_name,
        "points": n,
        "imaginary_fraction": sampled.imaginary_fraction(),
    });
    finish(
        Scenario::Kernels,
        &canon,
        None,
        Vec::new(),
        results,
        vec![file_name(&csv_path)],
        summary_path,
    )
}

pub fn fdt_check(
    ctx: &Context,
    regime: FdtRegimeArg,
    tol: Option<f64>,
) -> Result<Outcome, CliError> {
    let Setup {
        physical: p,
        mut canon,
        ..
    } = setup(ctx, Scenario::FdtCheck)?;
    let t = &ctx.tolerances;
    let n = ctx.config.n_omega.unwrap_or(DEFAULT_FDT_POINTS);
    let gamma_mode = ctx.config.gamma_mode.unwrap_or_default();
    canon.set("n_omega", n);
    let (checks, results, name) = match regime {
        FdtRegimeArg::Vacuum => {
            let tol = positive("--tol", tol.unwrap_or(t.fdt_vacuum))?;
            canon.set_f64("tol", tol);
            let r = checks::fdt_vacuum(&p, n, tol)?;
            let c = Check::new(
                "fdt_vacuum_max_rel_error",
                r.max_rel_error,
                0.0,
                tol,
                r.pass,
            );
            (
                vec![c],
                serde_json::to_value(&r).map_err(std::io::Error::other)?,
                "vacuum",
            )
        }
        FdtRegimeArg::Thermal => {
            let tol = positive("--tol", tol.unwrap_or(t.fdt_thermal))?;
            canon.set_f64("tol", tol);
            canon.set("gamma_mode", config::gamma_mode_name(gamma_mode));
            canon.set_f64("tol.fdt_zero_t_limit", t.fdt_zero_t_limit);
            let r = checks::fdt_thermal(&p, gamma_mode, n, tol, t.fdt_zero_t_limit)?;
            let cs = vec![
                Check::new(
                    "fdt_thermal_ohmic_max_rel_error",
                    r.ohmic.max_rel_error,
                    0.0,
                    tol,
                    r.ohmic.pass,
                ),
                Check::new(
                    "fdt_thermal_vacuum_coth_max_rel_error",
                    r.vacuum_coth.max_rel_error,
                    0.0,
                    tol,
                    r.vacuum_coth.pass,
                ),
                Check::new(
                    "fdt_zero_temperature_limit_max_rel_error",
                    r.zero_t_limit.max_rel_error,
                    0.0,
                    t.fdt_zero_t_limit,
                    r.zero_t_limit.pass,
                ),
            ];
            (
                cs,
                serde_json::to_value(&r).map_err(std::io::Error::other)?,
                "thermal",
            )
        }
        FdtRegimeArg::HighT => {
            let tol = positive("--tol", tol.unwrap_or(t.fdt_thermal))?;
            canon.set_f64("tol", tol);
            canon.set("gamma_mode", config::gamma_mode_name(gamma_mode));
            let r = checks::fdt_high_t(&p, gamma_mode, n, tol)?;
            let mut c = Check::new(
                "fdt_high_t_max_rel_error",
                r.max_rel_error,
                0.0,
                tol,
                r.pass,
            );
            if !kernels::high_temperature_regime(&p) {
                c = c.with_note("parameters are outside the high-temperature regime l >> tau_B");
            }
            (
                vec![c],
                serde_json::to_value(&r).map_err(std::io::Error::other)?,
                "highT",
            )
        }
    };
    canon.set("regime", name);
    let path = out_file(ctx, "fdt_report.json");
    let artifacts = vec![file_name(&path)];
    finish(
        Scenario::FdtCheck,
        &canon,
        None,
        checks,
        results,
        artifacts,
        path,
    )
}

fn noise_spec(arg: NoiseArg, r: &ReducedParams) -> Result<(NoiseSpec, &'static str), CliError> {
    Ok(match arg {
        NoiseArg::Vacuum => (NoiseSpec::vacuum(r), "vacuum"),
        NoiseArg::ThermalOu => (NoiseSpec::thermal_ou(r)?, "thermal-ou"),
        NoiseArg::White => (NoiseSpec::white(r)?, "white"),
    })
}

pub fn noise(ctx: &Context, arg: NoiseArg) -> Result<Outcome, CliError> {
    let Setup {
        reduced: r,
        mut canon,
        ..
    } = setup(ctx, Scenario::Noise)?;
    let cfg = &ctx.config;
    let seed = cfg.seed.ok_or_else(|| missing("seed"))?;
    let n_paths = path_count(cfg.n_paths.unwrap_or(DEFAULT_NOISE_PATHS))?;
    let (spec, name) = noise_spec(arg, &r)?;
    let default_dt = match spec {
        NoiseSpec::VacuumColored { cutoff, .. } => 0.05f64.min(0.5 / cutoff),
        NoiseSpec::ThermalOU { corr_time, .. } => 0.05f64.min(corr_time / 10.0),
        NoiseSpec::White { .. } => 0.05,
    };
    let dt = positive("dt", cfg.dt.unwrap_or(default_dt))?;
    let t_max = positive("t_max", cfg.t_max.unwrap_or(100.0))?;
    let files = cfg.path_files.unwrap_or(n_paths).min(n_paths);
    canon.set("spec", name);
    canon.set_f64("dt", dt);
    canon.set_f64("t_max", t_max);
    canon.set("n_paths", n_paths);
    canon.set("seed", seed);
    canon.set("path_files", files);
    canon.set_f64("tol.noise_se", ctx.tolerances.noise_se);
    let hash = canon.hash();

    let grid = TimeGrid::span(t_max, dt)?;
    let generator = NoiseGenerator::new(spec, grid)?;
    let dir = out_dir(ctx, Scenario::Noise);
    let width = (files.max(2) - 1).to_string().len().max(5);
    let mut artifacts = Vec::with_capacity(files + 2);
    for start in (0..files).step_by(PATH_FILE_CHUNK) {
        let count = PATH_FILE_CHUNK.min(files - start);
        let paths = exec::map_indexed(count, ctx.policy, |i| {
            generator.sample(noise::path_seed(seed, (start + i) as u64))
        });
        for (i, path) in paths.into_iter().enumerate() {
            let path = path?;
            let mut table = CsvTable::new(&["t", "eta"]);
            for (j, v) in path.values.iter().enumerate() {
                table.push(vec![grid.time(j), *v]);
            }
            let name = format!("path_{:0width$}.csv", start + i);
            output::write_csv(&dir.join(&name), &table, &hash)?;
            artifacts.push(name);
        }
    }

    let fidelity = checks::noise_fidelity(&generator, n_paths, seed, ctx.policy)?;
    let mut table = CsvTable::new(&["lag", "estimate", "se", "target"]);
    for k in 0..fidelity.lags.len() {
        table.push(vec![
            fidelity.lags[k],
            fidelity.estimate[k],
            fidelity.se[k],
            fidelity.target[k],
        ]);
    }
    output::write_csv(&dir.join("autocov.csv"), &table, &hash)?;
    artifacts.push("autocov.csv".into());
    let tol = ctx.tolerances.noise_se;
    let checks = vec![Check::new(
        "autocov_max_abs_z",
        fidelity.max_abs_z,
        0.0,
        tol,
        fidelity.max_abs_z <= tol,
    )];
    let results = json!({
        "spec": name,
        "n_paths": n_paths,
        "correlation_time": fidelity.correlation_time,
        "checked_lags": fidelity.checked.iter().map(|&k| fidelity.lags[k]).collect::<Vec<_>>(),
        "max_abs_z": fidelity.max_abs_z,
    });
    finish(
        Scenario::Noise,
        &canon,
        Some(seed),
        checks,
        results,
        artifacts,
        dir.join("summary.json"),
    )
}

fn trajectory_table(grid: TimeGrid, q: &[f64], v: &[f64]) -> CsvTable {
    let mut table = CsvTable::new(&["t", "q", "v"]);
    for j in 0..grid.len() {
        table.push(vec![grid.time(j), q[j], v[j]]);
    }
    table
}

pub fn decay(ctx: &Context) -> Result<Outcome, CliError> {
    let Setup {
        reduced: r,
        mut canon,
        ..
    } = setup(ctx, Scenario::Decay)?;
    let cfg = &ctx.config;
    let tol = &ctx.tolerances;
    let t_max = positive("t_max", cfg.t_max.unwrap_or(3000.0))?;
    let dt = positive("dt", cfg.dt.unwrap_or(0.05))?;
    canon.set_f64("t_max", t_max);
    canon.set_f64("dt", dt);
    canon.set_f64("tol.decay_rel", tol.decay_rel);
    canon.set_f64("tol.shift_rel", tol.shift_rel);
    let ensemble = match cfg.n_paths {
        Some(n) => {
            let seed = cfg.seed.ok_or_else(|| missing("seed"))?;
            canon.set("n_paths", n);
            canon.set("seed", seed);
            Some((path_count(n)?, seed))
        }
        None => None,
    };
    let hash = canon.hash();
    let dir = out_dir(ctx, Scenario::Decay);

    let grid = TimeGrid::span(t_max, dt)?;
    let traj = checks::noise_free_trajectory(&r, grid)?;
    let a = checks::decay_analysis(&r, &traj)?;
    output::write_csv(
        &dir.join("trajectory.csv"),
        &trajectory_table(grid, &traj.q, &traj.v),
        &hash,
    )?;
    let mut artifacts = vec!["trajectory.csv".to_string()];

    let mut checks = Vec::new();
    if a.envelope_decay > 0.0 {
        checks.push(Check::relative(
            "decay_rate",
            a.fit.decay_rate,
            a.envelope_decay,
            tol.decay_rel,
        ));
    } else {
        let pass = a.fit.decay_rate.abs() <= 3.0 * a.fit.decay_se;
        checks.push(Check::new(
            "decay_rate",
            a.fit.decay_rate,
            0.0,
            3.0 * a.fit.decay_se,
            pass,
        ));
    }
    if a.shift_envelope != 0.0 {
        checks.push(
            Check::relative(
                "freq_shift_oracle_vs_fit",
                a.oracle.freq_shift,
                a.fit.freq_shift,
                tol.shift_rel,
            )
            .with_note(format!(
                "fitted shift / envelope shift 3*eps*lambda = {}",
                a.shift_ratio_to_envelope
            )),
        );
    }

    let mut results = serde_json::to_value(&a).map_err(std::io::Error::other)?;
    if let Some((n, seed)) = ensemble {
        let mut ec = EnsembleConfig::new(r, grid, LangevinMode::Vacuum, n, seed)?;
        ec.ic = checks::classical_ic(&r);
        ec.policy = ctx.policy;
        let stats = observables::ensemble_run(&ec)?;
        let mut table = CsvTable::new(&["t", "mean_q", "se_mean_q", "q_noise_free"]);
        let mut max_z: f64 = 0.0;
        for j in 0..grid.len() {
            table.push(vec![
                grid.time(j),
                stats.mean_q[j],
                stats.se_mean_q[j],
                traj.q[j],
            ]);
            if stats.se_mean_q[j] > 0.0 {
                max_z = max_z.max(((stats.mean_q[j] - traj.q[j]) / stats.se_mean_q[j]).abs());
            }
        }
        output::write_csv(&dir.join("ensemble.csv"), &table, &hash)?;
        artifacts.push("ensemble.csv".into());
        results["ensemble"] = json!({ "n_paths": n, "max_abs_z_mean_vs_noise_free": max_z });
    }
    finish(
        Scenario::Decay,
        &canon,
        ensemble.map(|e| e.1),
        checks,
        results,
        artifacts,
        dir.join("summary.json"),
    )
}

fn ensemble_table(stats: &EnsembleStats) -> CsvTable {
    let mut table = CsvTable::new(&["t", "mean_q", "var_q", "mean_v", "var_v", "se_var_v"]);
    for j in 0..stats.grid.len() {
        table.push(vec![
            stats.grid.time(j),
            stats.mean_q[j],
            stats.var_q[j],
            stats.mean_v[j],
            stats.var_v[j],
            stats.se_var_v[j],
        ]);
    }
    table
}

/// Path 0 of an ensemble, re-integrated for the trajectory artifact.
fn first_path(
    r: &ReducedParams,
    grid: TimeGrid,
    spec: NoiseSpec,
    seed: u64,
    ic: (f64, f64),
    opts: &LangevinOptions,
) -> Result<CsvTable, CliError> {
    let eta = NoiseGenerator::new(spec, grid)?.sample(noise::path_seed(seed, 0))?;
    let traj = dynamics::langevin_integrate(r, grid, &eta, ic, opts)?;
    Ok(trajectory_table(grid, &traj.q, &traj.v))
}

pub fn heating(ctx: &Context) -> Result<Outcome, CliError> {
    let Setup {
        reduced: r,
        mut canon,
        ..
    } = setup(ctx, Scenario::Heating)?;
    let cfg = &ctx.config;
    let tol = &ctx.tolerances;
    let seed = cfg.seed.ok_or_else(|| missing("seed"))?;
    let n_paths = path_count(cfg.n_paths.unwrap_or(DEFAULT_ENSEMBLE_PATHS))?;
    let default_t_max = if r.epsilon > 0.0 {
        (0.1 / r.epsilon).min(100.0)
    } else {
        100.0
    };
    let t_max = positive("t_max", cfg.t_max.unwrap_or(default_t_max))?;
    let dt = positive("dt", cfg.dt.unwrap_or(0.02))?;
    let switch_on = cfg.switch_on.unwrap_or(DEFAULT_SWITCH_ON);
    let window = checks::heating_window(&r, t_max);
    canon.set_f64("t_max", t_max);
    canon.set_f64("dt", dt);
    canon.set("n_paths", n_paths);
    canon.set("seed", seed);
    canon.set_f64("switch_on", switch_on);
    canon.set_f64("tol.heating_rel", tol.heating_rel);
    if let Some(lc) = cfg.lambda_check {
        canon.set_f64("lambda_check", lc);
        canon.set_f64("tol.heating_invariance_se", tol.heating_invariance_se);
    }
    let hash = canon.hash();
    let dir = out_dir(ctx, Scenario::Heating);

    let grid = TimeGrid::span(t_max, dt)?;
    let (stats, run) =
        checks::heating_ensemble(&r, grid, n_paths, seed, switch_on, window, ctx.policy)?;
    output::write_csv(&dir.join("ensemble.csv"), &ensemble_table(&stats), &hash)?;
    let opts = checks::heating_options(switch_on);
    output::write_csv(
        &dir.join("trajectory.csv"),
        &first_path(&r, grid, NoiseSpec::vacuum(&r), seed, (0.0, 0.0), &opts)?,
        &hash,
    )?;
    let mut artifacts = vec!["ensemble.csv".to_string(), "trajectory.csv".to_string()];
    let mut checks = vec![Check::relative(
        "heating_slope",
        run.slope.slope,
        run.target,
        tol.heating_rel,
    )];
    let mut results = json!({ "main": run });

    if let Some(lc) = cfg.lambda_check {
        let r2 = ReducedParams::new(r.epsilon, lc, r.theta_t, r.amp0)?.with_phase(r.phase0)?;
        let (stats2, run2) =
            checks::heating_ensemble(&r2, grid, n_paths, seed, switch_on, window, ctx.policy)?;
        output::write_csv(
            &dir.join("ensemble_lambda_check.csv"),
            &ensemble_table(&stats2),
            &hash,
        )?;
        artifacts.push("ensemble_lambda_check.csv".into());
        let z = checks::slope_difference_z(&run.slope, &run2.slope);
        checks.push(Check::new(
            "heating_slope_cutoff_invariance_z",
            z,
            0.0,
            tol.heating_invariance_se,
            z <= tol.heating_invariance_se,
        ));
        results["lambda_check"] = json!(run2);
    }
    finish(
        Scenario::Heating,
        &canon,
        Some(seed),
        checks,
        results,
        artifacts,
        dir.join("summary.json"),
    )
}

pub fn thermal(ctx: &Context) -> Result<Outcome, CliError> {
    let Setup {
        reduced: r,
        mut canon,
        ..
    } = setup(ctx, Scenario::Thermal)?;
    let cfg = &ctx.config;
    let tol = ctx.tolerances.equipartition_rel;
    let seed = cfg.seed.ok_or_else(|| missing("seed"))?;
    let n_paths = path_count(cfg.n_paths.unwrap_or(DEFAULT_ENSEMBLE_PATHS))?;
    let gamma_mode = cfg.gamma_mode.unwrap_or_default();
    let thermal_noise = cfg.thermal_noise.unwrap_or_default();
    let t_relax =
        observables::relaxation_time(&r.sim_physical(), RelaxRegime::Thermal, gamma_mode)?;
    let t_max = positive("t_max", cfg.t_max.unwrap_or(10.0 * t_relax))?;
    let dt = positive("dt", cfg.dt.unwrap_or(0.02f64.min(t_relax / 50.0)))?;
    canon.set_f64("t_max", t_max);
    canon.set_f64("dt", dt);
    canon.set("n_paths", n_paths);
    canon.set("seed", seed);
    canon.set("gamma_mode", config::gamma_mode_name(gamma_mode));
    canon.set("thermal_noise", config::thermal_noise_name(thermal_noise));
    canon.set_f64("tol.equipartition_rel", tol);
    let hash = canon.hash();
    let dir = out_dir(ctx, Scenario::Thermal);

    let mode = match thermal_noise {
        ThermalNoise::White => LangevinMode::ThermalWhite,
        ThermalNoise::Ou => LangevinMode::ThermalOU,
    };
    let grid = TimeGrid::span(t_max, dt)?;
    let mut ec = EnsembleConfig::new(r, grid, mode, n_paths, seed)?;
    ec.langevin = ec.langevin.with_gamma_mode(gamma_mode);
    ec.policy = ctx.policy;
    let stats = observables::ensemble_run(&ec)?;
    output::write_csv(&dir.join("ensemble.csv"), &ensemble_table(&stats), &hash)?;
    output::write_csv(
        &dir.join("trajectory.csv"),
        &first_path(&r, grid, ec.noise, seed, ec.ic, &ec.langevin)?,
        &hash,
    )?;
    let artifacts = vec!["ensemble.csv".to_string(), "trajectory.csv".to_string()];

    let (check, report) = match observables::equipartition_check(&stats, &r, gamma_mode, None, tol)
    {
        Ok(rep) => (
            Check::new("equipartition", rep.measured, rep.target, tol, rep.pass),
            serde_json::to_value(&rep).map_err(std::io::Error::other)?,
        ),
        Err(mirrorlang_core::Error::NotStationary(msg)) => (
            Check::new("equipartition", f64::NAN, r.theta_t, tol, false)
                .with_note(format!("not stationary: {msg}")),
            serde_json::Value::Null,
        ),
        Err(e) => return Err(e.into()),
    };
    let results = json!({
        "relaxation_time": t_relax,
        "equipartition": report,
    });
    finish(
        Scenario::Thermal,
        &canon,
        Some(seed),
        vec![check],
        results,
        artifacts,
        dir.join("summary.json"),
    )
}

pub fn report(ctx: &Context) -> Result<Outcome, CliError> {
    if let Some(s) = ctx.config.scenario.filter(|s| *s != Scenario::Report) {
        return Err(CliError::Usage(format!(
            "config is for scenario `{s}`, not `report`"
        )));
    }
    let inputs = match ctx.config.params {
        None => HeadlineInputs::default(),
        Some(ParamBlock::Physical(b)) => HeadlineInputs {
            m_kg: b.m_kg,
            area_cm2: b.area_cm2,
            t_kev: b.t_kev,
            l0_cm: b.l0_cm.unwrap_or(HeadlineInputs::default().l0_cm),
            omega0_per_s: b.omega0_per_s,
        },
        Some(ParamBlock::Reduced(_)) => {
            return Err(CliError::Usage(
                "report needs laboratory parameters (m_kg, area_cm2, omega0_per_s, T_keV)".into(),
            ))
        }
    };
    let gamma_mode = ctx.config.gamma_mode.unwrap_or(GammaMode::Literal);
    let tol = &ctx.tolerances;
    let mut canon = Canonical::default();
    canon.set("scenario", Scenario::Report);
    for (name, value) in &ctx.tol_overrides {
        canon.set_f64(&format!("tol.{name}"), *value);
    }
    canon.set_f64("m_kg", inputs.m_kg);
    canon.set_f64("area_cm2", inputs.area_cm2);
    canon.set_f64("T_keV", inputs.t_kev);
    canon.set_f64("l0_cm", inputs.l0_cm);
    canon.set_f64("omega0_per_s", inputs.omega0_per_s);
    canon.set("gamma_mode", config::gamma_mode_name(gamma_mode));

    let estimates = observables::headline_estimates(&inputs, gamma_mode)?;
    let mut checks: Vec<Check> = estimates
        .iter()
        .map(|e| {
            Check::new(
                &e.name,
                e.value,
                e.target,
                tol.order_of_magnitude,
                e.factor <= tol.order_of_magnitude,
            )
            .with_note(format!("factor {} from target", e.factor))
        })
        .collect();
    let p = inputs.to_params()?;
    let quanta = checks::quanta_per_cycle(&p);
    checks.push(Check::new(
        "quanta_per_cycle",
        quanta,
        tol.energy_quanta,
        tol.energy_quanta,
        quanta < tol.energy_quanta,
    ));
    let si = SiConversion::new();
    let results = json!({
        "estimates": estimates,
        "quanta_per_cycle": quanta,
        "quanta_per_cycle_order_of_magnitude": observables::energy_gain_order_of_magnitude(&p) / p.omega0(),
        "vacuum_relaxation_time_s": si.time_to_si(observables::relaxation_time(&p, RelaxRegime::Vacuum, gamma_mode)?),
        "epsilon": p.epsilon(),
        "high_temperature_regime": kernels::high_temperature_regime(&p),
        "sigma_variant": config::sigma_variant_name(ctx.config.sigma_variant.unwrap_or(SigmaThermalVariant::Leading)),
    });
    let path = out_file(ctx, "report.json");
    let artifacts = vec![file_name(&path)];
    finish(
        Scenario::Report,
        &canon,
        None,
        checks,
        results,
        artifacts,
        path,
    )
}
