//! Monte-Carlo ensembles and the headline derived quantities: heating
//! slopes, relaxation times, fluctuation ratios, energy gain per cycle and
//! equipartition.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dynamics::{self, LangevinMode, LangevinOptions};
use crate::error::{Error, Result};
use crate::exec::{self, ExecPolicy};
use crate::grid::TimeGrid;
use crate::kernels::{self, GammaMode};
use crate::noise::{self, NoiseGenerator, NoiseSpec};
use crate::params::{self, PhysicalParams, ReducedParams, SiConversion, SiInputs};
use crate::stats::{self, BinMoments};

/// Number of fixed path batches used for standard errors.
pub const DEFAULT_BATCHES: usize = 50;

/// Acceptance band for order-of-magnitude estimates.
pub const ORDER_OF_MAGNITUDE_FACTOR: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub params: ReducedParams,
    pub grid: TimeGrid,
    pub noise: NoiseSpec,
    pub langevin: LangevinOptions,
    pub ic: (f64, f64),
    pub n_paths: usize,
    pub master_seed: u64,
    pub n_batches: usize,
    pub oversample: usize,
    pub policy: ExecPolicy,
}

impl EnsembleConfig {
    /// Ensemble for `mode` with the matching noise law, default batching
    /// and parallel execution.
    pub fn new(
        params: ReducedParams,
        grid: TimeGrid,
        mode: LangevinMode,
        n_paths: usize,
        master_seed: u64,
    ) -> Result<Self> {
        let noise = match mode {
            LangevinMode::Vacuum => NoiseSpec::vacuum(&params),
            LangevinMode::ThermalWhite => NoiseSpec::white(&params)?,
            LangevinMode::ThermalOU => NoiseSpec::thermal_ou(&params)?,
        };
        Ok(Self {
            params,
            grid,
            noise,
            langevin: LangevinOptions::new(mode),
            ic: (0.0, 0.0),
            n_paths,
            master_seed,
            n_batches: DEFAULT_BATCHES,
            oversample: noise::DEFAULT_OVERSAMPLE,
            policy: ExecPolicy::default(),
        })
    }
}

/// Per-time-bin ensemble moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub grid: TimeGrid,
    pub mean_q: Vec<f64>,
    pub var_q: Vec<f64>,
    pub mean_v: Vec<f64>,
    pub var_v: Vec<f64>,
    pub se_mean_q: Vec<f64>,
    pub se_var_v: Vec<f64>,
    pub n_paths: usize,
    pub master_seed: u64,
    /// Velocity variance of each fixed path batch, used for standard errors
    /// of derived quantities.
    pub batch_var_v: Vec<Vec<f64>>,
}

/// Runs `n_paths` Langevin trajectories with seeds derived from the master
/// seed and path index.
///
/// Paths are grouped into fixed contiguous batches; each batch is reduced
/// sequentially and batches are merged in index order, so the result does
/// not depend on the execution policy or thread count.
pub fn ensemble_run(config: &EnsembleConfig) -> Result<EnsembleStats> {
    if config.n_paths < 2 {
        return Err(Error::InvalidParams(format!(
            "need at least 2 paths, got {}",
            config.n_paths
        )));
    }
    config.params.validate(params::DEFAULT_MAX_EPSILON)?;
    let generator = NoiseGenerator::with_oversample(config.noise, config.grid, config.oversample)?;
    let coeffs = dynamics::coefficients(&config.params, &config.langevin)?;
    let n = config.grid.len();
    let n_paths = config.n_paths;
    let batches = config.n_batches.min(n_paths / 2).max(1);
    let white = matches!(config.noise, NoiseSpec::White { .. });

    let results = exec::map_indexed(
        batches,
        config.policy,
        |b| -> Result<(BinMoments, BinMoments)> {
            let lo = b * n_paths / batches;
            let hi = (b + 1) * n_paths / batches;
            let mut mq = BinMoments::new(n);
            let mut mv = BinMoments::new(n);
            let mut q = vec![0.0; n];
            let mut v = vec![0.0; n];
            for path in lo..hi {
                let eta = generator.sample(noise::path_seed(config.master_seed, path as u64))?;
                dynamics::integrate_with(
                    coeffs,
                    config.grid,
                    &eta.values,
                    white,
                    config.ic,
                    config.params.amp0,
                    config.langevin.switch_on,
                    |j, a, c| {
                        q[j] = a;
                        v[j] = c;
                    },
                )?;
                mq.push(&q);
                mv.push(&v);
            }
            Ok((mq, mv))
        },
    );

    let mut total_q = BinMoments::new(n);
    let mut total_v = BinMoments::new(n);
    let mut batch_var_v = Vec::with_capacity(batches);
    for r in results {
        let (mq, mv) = r?;
        total_q.merge(&mq);
        total_v.merge(&mv);
        batch_var_v.push(mv.variance());
    }
    let var_q = total_q.variance();
    let var_v = total_v.variance();
    let p = n_paths as f64;
    let se_mean_q = var_q.iter().map(|v| (v / p).sqrt()).collect();
    let se_var_v = if batches >= 2 {
        (0..n)
            .map(|j| {
                let vals: Vec<f64> = batch_var_v.iter().map(|b| b[j]).collect();
                stats::mean_se(&vals).1
            })
            .collect()
    } else {
        // Gaussian approximation Var(s²) = 2σ⁴/(P − 1).
        var_v.iter().map(|v| v * (2.0 / (p - 1.0)).sqrt()).collect()
    };
    Ok(EnsembleStats {
        grid: config.grid,
        mean_q: total_q.mean,
        var_q,
        mean_v: total_v.mean,
        var_v,
        se_mean_q,
        se_var_v,
        n_paths,
        master_seed: config.master_seed,
        batch_var_v,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeEstimate {
    pub slope: f64,
    pub se: f64,
    pub n_points: usize,
}

/// Least-squares slope of var v against t over `[t_lo, t_hi]`.
///
/// Points are weighted uniformly: weights taken from the estimated
/// per-bin errors would correlate with the values themselves and bias the
/// slope low. The standard error is the spread of the same fit over the
/// fixed path batches.
pub fn variance_slope(stats: &EnsembleStats, window: (f64, f64)) -> Result<SlopeEstimate> {
    let range = stats.grid.index_range(window.0, window.1);
    if range.len() < 10 {
        return Err(Error::WindowTooShort(format!(
            "window [{}, {}] holds {} grid points, need 10",
            window.0,
            window.1,
            range.len()
        )));
    }
    let t: Vec<f64> = range.clone().map(|j| stats.grid.time(j)).collect();
    let slope = stats::ols_slope(&t, &stats.var_v[range.clone()]);
    let se = if stats.batch_var_v.len() >= 2 {
        let slopes: Vec<f64> = stats
            .batch_var_v
            .iter()
            .map(|b| stats::ols_slope(&t, &b[range.clone()]))
            .collect();
        stats::mean_se(&slopes).1
    } else {
        0.0
    };
    Ok(SlopeEstimate {
        slope,
        se,
        n_points: t.len(),
    })
}

/// Heating window [10/ω₀, 0.1·t_relax] in simulation units.
pub fn default_heating_window(params: &ReducedParams) -> (f64, f64) {
    let t_relax = if params.epsilon > 0.0 {
        1.0 / params.epsilon
    } else {
        f64::INFINITY
    };
    (10.0, 0.1 * t_relax)
}

/// Vacuum heating rate S(ω₀)/(2m²) = Aω₀⁵/(1440π²m²).
pub fn vacuum_heating_slope(params: &PhysicalParams) -> f64 {
    params.area() * params.omega0().powi(5) / (1440.0 * PI * PI * params.mass().powi(2))
}

/// Free-particle thermal heating rate D/(2m²).
pub fn thermal_heating_slope(params: &PhysicalParams) -> Result<f64> {
    Ok(kernels::sigma_thermal_white_strength(params)? / (2.0 * params.mass().powi(2)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelaxRegime {
    Vacuum,
    Thermal,
}

/// Vacuum: 720π²m/(Aω₀⁴). Thermal: m/γ.
pub fn relaxation_time(
    params: &PhysicalParams,
    regime: RelaxRegime,
    gamma_mode: GammaMode,
) -> Result<f64> {
    match regime {
        RelaxRegime::Vacuum => {
            Ok(720.0 * PI * PI * params.mass() / (params.area() * params.omega0().powi(4)))
        }
        RelaxRegime::Thermal => Ok(params.mass() / kernels::gamma_thermal(params, gamma_mode)?),
    }
}

/// Largest oscillation-relative velocity fluctuation √(T/m)/(l₀ω₀).
pub fn max_fluctuation_ratio(params: &PhysicalParams) -> Result<f64> {
    if params.l0() <= 0.0 {
        return Err(Error::ZeroAmplitude);
    }
    if params.temperature() <= 0.0 {
        return Err(Error::ZeroTemperature);
    }
    Ok((params.temperature() / params.mass()).sqrt() / (params.l0() * params.omega0()))
}

/// Estimates of the largest thermal velocity variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxVelocityVariance {
    /// T/m
    pub order_of_magnitude: f64,
    /// D/(2γm²), the stationary value of the damped equation.
    pub stationary: f64,
    /// The same growth law from rest evaluated at t = t_relax.
    pub at_relaxation_time: f64,
}

pub fn max_velocity_variance(
    params: &PhysicalParams,
    gamma_mode: GammaMode,
) -> Result<MaxVelocityVariance> {
    let d = kernels::sigma_thermal_white_strength(params)?;
    let gamma = kernels::gamma_thermal(params, gamma_mode)?;
    let m = params.mass();
    let stationary = d / (2.0 * gamma * m * m);
    Ok(MaxVelocityVariance {
        order_of_magnitude: params.temperature() / m,
        stationary,
        at_relaxation_time: stationary * -(-2.0f64).exp_m1(),
    })
}

/// Kinetic energy gained per period, ½m·(Aω₀⁵/1440π²m²)·(2π/ω₀).
pub fn energy_gain_per_cycle(params: &PhysicalParams) -> f64 {
    0.5 * params.mass() * vacuum_heating_slope(params) * 2.0 * PI / params.omega0()
}

/// The order-of-magnitude form (1/1440π²)(Aω₀²)(ω₀/m)ω₀, smaller than
/// [`energy_gain_per_cycle`] by exactly π.
pub fn energy_gain_order_of_magnitude(params: &PhysicalParams) -> f64 {
    let w = params.omega0();
    params.area() * w * w * (w / params.mass()) * w / (1440.0 * PI * PI)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquipartitionReport {
    /// m⟨v²⟩ averaged over the window.
    pub measured: f64,
    pub se: f64,
    /// k_BT
    pub target: f64,
    pub rel_error: f64,
    pub tolerance: f64,
    pub window: (f64, f64),
    pub pass: bool,
    pub reason: Option<String>,
}

/// Compares the stationary m⟨v²⟩ with T over the window starting at
/// `5·t_relax` (or `window_start` when given).
pub fn equipartition_check(
    stats: &EnsembleStats,
    params: &ReducedParams,
    gamma_mode: GammaMode,
    window_start: Option<f64>,
    tol: f64,
) -> Result<EquipartitionReport> {
    let sim = params.sim_physical();
    let t_relax = relaxation_time(&sim, RelaxRegime::Thermal, gamma_mode)?;
    let start = window_start.unwrap_or(stats.grid.t0() + 5.0 * t_relax);
    let end = stats.grid.t_end();
    let range = stats.grid.index_range(start, end);
    if range.len() < 10 {
        return Err(Error::WindowTooShort(format!(
            "stationary window [{start}, {end}] holds {} grid points",
            range.len()
        )));
    }
    let avg = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let mid = range.start + range.len() / 2;
    let measured = avg(&stats.var_v[range.clone()]);
    let batch_means: Vec<f64> = stats
        .batch_var_v
        .iter()
        .map(|b| avg(&b[range.clone()]))
        .collect();
    let se = stats::mean_se(&batch_means).1;
    let first = avg(&stats.var_v[range.start..mid]);
    let second = avg(&stats.var_v[mid..range.end]);
    let diffs: Vec<f64> = stats
        .batch_var_v
        .iter()
        .map(|b| avg(&b[range.start..mid]) - avg(&b[mid..range.end]))
        .collect();
    let se_diff = stats::mean_se(&diffs).1;
    if (first - second).abs() > 3.0 * se_diff && se_diff > 0.0 {
        return Err(Error::NotStationary(format!(
            "halves differ by {} (SE {se_diff})",
            first - second
        )));
    }
    let target = params.theta_t;
    let rel_error = if target > 0.0 {
        (measured - target).abs() / target
    } else {
        f64::INFINITY
    };
    let (pass, reason) = if measured <= 0.0 {
        (
            false,
            Some("no velocity fluctuations in the window".to_string()),
        )
    } else if rel_error > tol {
        (
            false,
            Some(format!(
                "m<v^2> = {measured} differs from T = {target} by {rel_error}"
            )),
        )
    } else {
        (true, None)
    };
    Ok(EquipartitionReport {
        measured,
        se,
        target,
        rel_error,
        tolerance: tol,
        window: (start, end),
        pass,
        reason,
    })
}

/// A closed-form estimate compared with an order-of-magnitude target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub name: String,
    pub value: f64,
    pub target: f64,
    pub unit: String,
    /// max(value/target, target/value)
    pub factor: f64,
    pub pass: bool,
}

impl Estimate {
    fn new(name: &str, value: f64, target: f64, unit: &str) -> Self {
        let factor = (value / target).max(target / value);
        Self {
            name: name.to_string(),
            value,
            target,
            unit: unit.to_string(),
            factor,
            pass: factor.is_finite() && factor <= ORDER_OF_MAGNITUDE_FACTOR,
        }
    }
}

/// Laboratory parameters for the headline estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeadlineInputs {
    pub m_kg: f64,
    pub area_cm2: f64,
    pub t_kev: f64,
    pub l0_cm: f64,
    pub omega0_per_s: f64,
}

impl Default for HeadlineInputs {
    /// 1 kg, 100 cm², 1 keV, 10 cm, 1 s⁻¹.
    fn default() -> Self {
        Self {
            m_kg: 1.0,
            area_cm2: 100.0,
            t_kev: 1.0,
            l0_cm: 10.0,
            omega0_per_s: 1.0,
        }
    }
}

impl HeadlineInputs {
    pub fn to_params(&self) -> Result<PhysicalParams> {
        SiInputs {
            m_kg: self.m_kg,
            area_cm2: self.area_cm2,
            omega0_per_s: self.omega0_per_s,
            lambda_ratio: 1.0,
            t_kev: self.t_kev,
            l0_cm: Some(self.l0_cm),
            theta0_s: None,
        }
        .to_params()
    }
}

/// Thermal relaxation time, maximal fluctuation ratio and thermal mass
/// shift in SI units, each with its order-of-magnitude target.
pub fn headline_estimates(inputs: &HeadlineInputs, gamma_mode: GammaMode) -> Result<Vec<Estimate>> {
    let p = inputs.to_params()?;
    let si = SiConversion::new();
    let t_relax = si.time_to_si(relaxation_time(&p, RelaxRegime::Thermal, gamma_mode)?);
    let ratio = max_fluctuation_ratio(&p)?;
    let dm = (params::thermal_mass_shift(&p)? / p.mass()).abs();
    Ok(vec![
        Estimate::new("t_relax", t_relax, 1e-2, "s"),
        Estimate::new("dl_max_over_l0", ratio, 1e-8, "1"),
        Estimate::new("dm_thermal_over_m", dm, 1e-16, "1"),
    ])
}
