//! Fluctuation–dissipation checks on sampled frequency kernels.
//!
//! Every check reports the worst relative deviation
//! `|σ(ω) − K(ω) Im χ(ω)| / max(|σ(ω)|, floor)` over the grid, where the
//! kernel `K` is coth(ω/2T), sign(ω) or 2T/ω depending on the regime.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{Domain, KernelKind, SampledKernel};

/// Absolute floor of the relative-error denominator.
pub const REL_ERROR_FLOOR: f64 = 1e-30;

/// Fraction of the grid maximum excluded around ω = 0 in thermal checks.
pub const DEFAULT_ZERO_BAND: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FdtRegime {
    Thermal,
    Vacuum,
    HighT,
    Classical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdtReport {
    pub regime: FdtRegime,
    pub grid: Vec<f64>,
    pub max_rel_error: f64,
    pub pass: bool,
    pub tolerance: f64,
}

impl FdtReport {
    fn new(regime: FdtRegime, grid: Vec<f64>, max_rel_error: f64, tolerance: f64) -> Self {
        Self {
            regime,
            grid,
            max_rel_error,
            pass: max_rel_error <= tolerance,
            tolerance,
        }
    }
}

/// ρ(ω) = −2 Im χ(ω).
pub fn spectral_density(chi: &SampledKernel) -> Result<SampledKernel> {
    require(chi, KernelKind::ChiFF)?;
    let values = chi
        .values()
        .iter()
        .map(|v| Complex64::new(-2.0 * v.im, 0.0))
        .collect();
    SampledKernel::new(
        Domain::Frequency,
        KernelKind::SpectralDensity,
        chi.grid().to_vec(),
        values,
    )
}

/// Dissipation kernel implied by a fluctuation spectrum through the thermal
/// theorem: Im χ = σ tanh(ω/2T), with vanishing real part.
pub fn chi_from_sigma_thermal(sigma: &SampledKernel, temperature: f64) -> Result<SampledKernel> {
    require(sigma, KernelKind::SigmaFF)?;
    check_temperature(temperature)?;
    let values = sigma
        .grid()
        .iter()
        .zip(sigma.values())
        .map(|(&w, s)| Complex64::new(0.0, s.re * (w / (2.0 * temperature)).tanh()))
        .collect();
    SampledKernel::new(
        Domain::Frequency,
        KernelKind::ChiFF,
        sigma.grid().to_vec(),
        values,
    )
}

/// σ = −½ ρ coth(ω/2T). Grid points at ω = 0 map to zero.
pub fn sigma_from_spectral_density(rho: &SampledKernel, temperature: f64) -> Result<SampledKernel> {
    require(rho, KernelKind::SpectralDensity)?;
    check_temperature(temperature)?;
    let values = rho
        .grid()
        .iter()
        .zip(rho.values())
        .map(|(&w, r)| {
            let v = if w == 0.0 {
                0.0
            } else {
                -0.5 * r.re / (w / (2.0 * temperature)).tanh()
            };
            Complex64::new(v, 0.0)
        })
        .collect();
    SampledKernel::new(
        Domain::Frequency,
        KernelKind::SigmaFF,
        rho.grid().to_vec(),
        values,
    )
}

pub fn check_fdt_thermal(
    sigma: &SampledKernel,
    chi: &SampledKernel,
    temperature: f64,
    tol: f64,
) -> Result<FdtReport> {
    check_fdt_thermal_with_band(sigma, chi, temperature, tol, DEFAULT_ZERO_BAND)
}

pub fn check_fdt_thermal_with_band(
    sigma: &SampledKernel,
    chi: &SampledKernel,
    temperature: f64,
    tol: f64,
    zero_band: f64,
) -> Result<FdtReport> {
    check_temperature(temperature)?;
    let beta_half = 0.5 / temperature;
    compare(FdtRegime::Thermal, sigma, chi, tol, zero_band, |w| {
        1.0 / (w * beta_half).tanh()
    })
}

pub fn check_fdt_vacuum(sigma: &SampledKernel, chi: &SampledKernel, tol: f64) -> Result<FdtReport> {
    compare(FdtRegime::Vacuum, sigma, chi, tol, 0.0, |w| {
        if w > 0.0 {
            1.0
        } else if w < 0.0 {
            -1.0
        } else {
            0.0
        }
    })
}

pub fn check_fdt_high_t(
    sigma: &SampledKernel,
    chi: &SampledKernel,
    temperature: f64,
    tol: f64,
) -> Result<FdtReport> {
    check_temperature(temperature)?;
    compare(FdtRegime::HighT, sigma, chi, tol, DEFAULT_ZERO_BAND, |w| {
        2.0 * temperature / w
    })
}

/// Classical Brownian-motion form ν = 2γT between a white-noise strength
/// and a local damping coefficient.
pub fn check_fdt_classical(
    gamma: f64,
    noise_strength: f64,
    temperature: f64,
    tol: f64,
) -> Result<FdtReport> {
    check_temperature(temperature)?;
    let expected = 2.0 * gamma * temperature;
    let err = (noise_strength - expected).abs() / noise_strength.abs().max(REL_ERROR_FLOOR);
    Ok(FdtReport::new(FdtRegime::Classical, Vec::new(), err, tol))
}

fn compare(
    regime: FdtRegime,
    sigma: &SampledKernel,
    chi: &SampledKernel,
    tol: f64,
    zero_band: f64,
    kernel: impl Fn(f64) -> f64,
) -> Result<FdtReport> {
    require(sigma, KernelKind::SigmaFF)?;
    require(chi, KernelKind::ChiFF)?;
    if sigma.grid() != chi.grid() {
        return Err(Error::GridMismatch(
            "sigma and chi are sampled on different grids".into(),
        ));
    }
    let scale = sigma.grid().iter().fold(0.0_f64, |m, w| m.max(w.abs()));
    let excluded = zero_band * scale;
    let mut used = Vec::with_capacity(sigma.len());
    let mut worst = 0.0_f64;
    for ((&w, s), c) in sigma.grid().iter().zip(sigma.values()).zip(chi.values()) {
        if regime != FdtRegime::Vacuum && (w == 0.0 || w.abs() < excluded) {
            continue;
        }
        let predicted = c.im * kernel(w);
        let err = (s.re - predicted).abs() / s.re.abs().max(REL_ERROR_FLOOR);
        worst = worst.max(err);
        used.push(w);
    }
    Ok(FdtReport::new(regime, used, worst, tol))
}

fn require(kernel: &SampledKernel, kind: KernelKind) -> Result<()> {
    if kernel.domain != Domain::Frequency {
        return Err(Error::DomainMismatch(
            "expected a frequency-domain kernel".into(),
        ));
    }
    if kernel.kind != kind {
        return Err(Error::DomainMismatch(format!(
            "expected {kind:?}, got {:?}",
            kernel.kind
        )));
    }
    Ok(())
}

fn check_temperature(temperature: f64) -> Result<()> {
    if temperature > 0.0 {
        Ok(())
    } else {
        Err(Error::ZeroTemperature)
    }
}
