//! Numerical checks shared by the scenarios and the acceptance suite.

use mirrorlang_core::dynamics::{
    self, LangevinMode, LangevinOptions, SecularCoefficients, SecularFit, Trajectory,
};
use mirrorlang_core::fdt::{self, FdtReport};
use mirrorlang_core::kernels::{self, Domain, GammaMode, KernelKind, SampledKernel};
use mirrorlang_core::noise::{self, NoiseGenerator, NoisePath};
use mirrorlang_core::observables::{self, EnsembleConfig, EnsembleStats, SlopeEstimate};
use mirrorlang_core::{ExecPolicy, PhysicalParams, ReducedParams, Result, TimeGrid};
use serde::Serialize;

/// Frequency grid (Λ/n, …, Λ] used by the FDT checks.
pub fn fdt_grid(cutoff: f64, n: usize) -> Result<Vec<f64>> {
    kernels::uniform_grid(cutoff / n as f64, cutoff, n)
}

fn freq_kernel(
    kind: KernelKind,
    grid: &[f64],
    f: impl Fn(f64) -> Result<f64>,
) -> Result<SampledKernel> {
    let values: Vec<f64> = grid.iter().map(|&w| f(w)).collect::<Result<_>>()?;
    SampledKernel::from_real(Domain::Frequency, kind, grid.to_vec(), &values)
}

fn chi_vacuum(grid: &[f64], p: &PhysicalParams) -> Result<SampledKernel> {
    let values = grid
        .iter()
        .map(|&w| kernels::chi_vacuum_freq(w, p))
        .collect::<Result<_>>()?;
    SampledKernel::new(Domain::Frequency, KernelKind::ChiFF, grid.to_vec(), values)
}

fn chi_thermal(grid: &[f64], p: &PhysicalParams, mode: GammaMode) -> Result<SampledKernel> {
    let values = grid
        .iter()
        .map(|&w| kernels::chi_thermal_freq(w, p, mode))
        .collect::<Result<_>>()?;
    SampledKernel::new(Domain::Frequency, KernelKind::ChiFF, grid.to_vec(), values)
}

/// σ = Im χ for the vacuum kernels.
pub fn fdt_vacuum(p: &PhysicalParams, n: usize, tol: f64) -> Result<FdtReport> {
    let grid = fdt_grid(p.cutoff(), n)?;
    let sigma = freq_kernel(KernelKind::SigmaFF, &grid, |w| {
        kernels::sigma_vacuum_spectrum(w, p)
    })?;
    fdt::check_fdt_vacuum(&sigma, &chi_vacuum(&grid, p)?, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThermalFdt {
    /// Ohmic χ = iγω against σ = γω coth(ω/2T).
    pub ohmic: FdtReport,
    /// Vacuum χ against S(ω) coth(ω/2T).
    pub vacuum_coth: FdtReport,
    /// Thermal relation on the vacuum pair at T = 10⁻⁹ Λ.
    pub zero_t_limit: FdtReport,
}

pub fn fdt_thermal(
    p: &PhysicalParams,
    mode: GammaMode,
    n: usize,
    tol: f64,
    zero_t_tol: f64,
) -> Result<ThermalFdt> {
    let t = p.temperature();
    let grid = fdt_grid(p.cutoff(), n)?;
    let sigma = freq_kernel(KernelKind::SigmaFF, &grid, |w| {
        kernels::sigma_thermal_ohmic(w, p, mode)
    })?;
    let ohmic = fdt::check_fdt_thermal(&sigma, &chi_thermal(&grid, p, mode)?, t, tol)?;
    let chi_vac = chi_vacuum(&grid, p)?;
    let coth = freq_kernel(KernelKind::SigmaFF, &grid, |w| {
        Ok(kernels::sigma_vacuum_spectrum(w, p)? / (w / (2.0 * t)).tanh())
    })?;
    let vacuum_coth = fdt::check_fdt_thermal(&coth, &chi_vac, t, tol)?;
    let vac_sigma = freq_kernel(KernelKind::SigmaFF, &grid, |w| {
        kernels::sigma_vacuum_spectrum(w, p)
    })?;
    let zero_t_limit = fdt::check_fdt_thermal(&vac_sigma, &chi_vac, 1e-9 * p.cutoff(), zero_t_tol)?;
    Ok(ThermalFdt {
        ohmic,
        vacuum_coth,
        zero_t_limit,
    })
}

/// White σ = D against the ohmic χ under the high-temperature relation.
pub fn fdt_high_t(p: &PhysicalParams, mode: GammaMode, n: usize, tol: f64) -> Result<FdtReport> {
    let grid = fdt_grid(p.cutoff(), n)?;
    let d = kernels::sigma_thermal_white_strength(p)?;
    let sigma = freq_kernel(KernelKind::SigmaFF, &grid, |_| Ok(d))?;
    fdt::check_fdt_high_t(&sigma, &chi_thermal(&grid, p, mode)?, p.temperature(), tol)
}

/// Ensemble autocovariance compared with the continuum target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseFidelity {
    pub n_paths: usize,
    pub correlation_time: f64,
    pub lags: Vec<f64>,
    pub estimate: Vec<f64>,
    pub se: Vec<f64>,
    pub target: Vec<f64>,
    /// Grid lags nearest to 0, 1, …, 10 correlation times.
    pub checked: Vec<usize>,
    pub max_abs_z: f64,
}

pub const FIDELITY_CORRELATION_TIMES: usize = 10;

pub fn noise_fidelity(
    generator: &NoiseGenerator,
    n_paths: usize,
    seed: u64,
    policy: ExecPolicy,
) -> Result<NoiseFidelity> {
    let grid = generator.grid();
    let spec = generator.spec();
    let dt = grid.dt();
    let tc = spec.correlation_time(dt);
    let per_tc = (tc / dt).round().max(1.0) as usize;
    let max_lag = (FIDELITY_CORRELATION_TIMES * per_tc).min(grid.len() - 1);
    let est = noise::ensemble_autocovariance(generator, n_paths, seed, max_lag, policy)?;
    let lags = est.lags().to_vec();
    let estimate: Vec<f64> = (0..lags.len()).map(|k| est.value(k)).collect();
    let target: Vec<f64> = lags
        .iter()
        .map(|&tau| spec.autocovariance(tau, dt))
        .collect();
    let checked: Vec<usize> = (0..=FIDELITY_CORRELATION_TIMES)
        .map(|k| (k * per_tc).min(max_lag))
        .collect();
    let max_abs_z = checked
        .iter()
        .map(|&k| {
            let d = estimate[k] - target[k];
            if est.se[k] > 0.0 {
                (d / est.se[k]).abs()
            } else if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max);
    Ok(NoiseFidelity {
        n_paths,
        correlation_time: tc,
        lags,
        estimate,
        se: est.se,
        target,
        checked,
        max_abs_z,
    })
}

/// Initial conditions matching q_c = amp0 cos(t − θ₀) at t = 0.
pub fn classical_ic(p: &ReducedParams) -> (f64, f64) {
    (p.amp0 * p.phase0.cos(), p.amp0 * p.phase0.sin())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayAnalysis {
    pub fit: SecularFit,
    pub oracle: SecularCoefficients,
    pub oracle_span: f64,
    pub envelope_decay: f64,
    pub shift_envelope: f64,
    pub shift_reduced: f64,
    /// Exact shift of the integrated equation, √(1 + κ − γ²/4) − 1.
    pub shift_integrated_equation: f64,
    pub shift_ratio_to_envelope: f64,
}

/// Noise-free vacuum trajectory from the classical initial state.
pub fn noise_free_trajectory(p: &ReducedParams, grid: TimeGrid) -> Result<Trajectory> {
    dynamics::langevin_integrate(
        p,
        grid,
        &NoisePath::zeros(grid),
        classical_ic(p),
        &LangevinOptions::new(LangevinMode::Vacuum),
    )
}

/// Fits the integrated trajectory and projects the perturbative oracle on
/// its secular terms. The oracle runs over min(t_max, 0.3/ε) so the
/// secular terms stay small compared with the classical motion.
pub fn decay_analysis(p: &ReducedParams, traj: &Trajectory) -> Result<DecayAnalysis> {
    let fit = dynamics::secular_fit(traj)?;
    let t_max = traj.grid.duration();
    let span = if p.epsilon > 0.0 {
        t_max.min(0.3 / p.epsilon)
    } else {
        t_max
    };
    let dt = traj.grid.dt().min(0.01);
    let oracle_traj = dynamics::mean_evolution_perturbative(p, TimeGrid::span(span, dt)?)?;
    let oracle = dynamics::perturbative_secular_coefficients(&oracle_traj)?;
    let env = dynamics::rg_envelope(p)?;
    let coeffs = dynamics::coefficients(p, &LangevinOptions::new(LangevinMode::Vacuum))?;
    Ok(DecayAnalysis {
        fit,
        oracle,
        oracle_span: span,
        envelope_decay: env.decay_rate,
        shift_envelope: env.freq_shift_envelope,
        shift_reduced: env.freq_shift_reduced,
        shift_integrated_equation: coeffs.damped_shift(),
        shift_ratio_to_envelope: if env.freq_shift_envelope != 0.0 {
            fit.freq_shift / env.freq_shift_envelope
        } else {
            f64::NAN
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatingRun {
    pub lambda: f64,
    pub window: (f64, f64),
    pub slope: SlopeEstimate,
    pub target: f64,
    pub rel_error: f64,
}

/// Vacuum ensemble without back-reaction, forcing ramped on over
/// `switch_on`, and its velocity-variance slope over `window`.
pub fn heating_ensemble(
    p: &ReducedParams,
    grid: TimeGrid,
    n_paths: usize,
    seed: u64,
    switch_on: f64,
    window: (f64, f64),
    policy: ExecPolicy,
) -> Result<(EnsembleStats, HeatingRun)> {
    let mut cfg = EnsembleConfig::new(*p, grid, LangevinMode::Vacuum, n_paths, seed)?;
    cfg.langevin = heating_options(switch_on);
    cfg.policy = policy;
    let stats = observables::ensemble_run(&cfg)?;
    let slope = observables::variance_slope(&stats, window)?;
    let target = observables::vacuum_heating_slope(&p.sim_physical());
    Ok((
        stats,
        HeatingRun {
            lambda: p.lambda,
            window,
            slope,
            target,
            rel_error: (slope.slope / target - 1.0).abs(),
        },
    ))
}

pub fn heating_options(switch_on: f64) -> LangevinOptions {
    LangevinOptions::new(LangevinMode::Vacuum)
        .without_backreaction()
        .with_switch_on(switch_on)
}

/// Slope difference in units of its combined standard error.
pub fn slope_difference_z(a: &SlopeEstimate, b: &SlopeEstimate) -> f64 {
    let se = a.se.hypot(b.se);
    let d = (a.slope - b.slope).abs();
    if se > 0.0 {
        d / se
    } else if d == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Quanta radiated per oscillation period, E_cycle/(ħω₀).
pub fn quanta_per_cycle(p: &PhysicalParams) -> f64 {
    observables::energy_gain_per_cycle(p) / p.omega0()
}

/// Default heating window upper edge, 0.1/ε, clipped to the grid.
pub fn heating_window(p: &ReducedParams, t_max: f64) -> (f64, f64) {
    let (lo, hi) = observables::default_heating_window(p);
    (lo, hi.min(t_max))
}
