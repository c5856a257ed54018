//! Closed-form scalar-field Green's functions and the force kernels
//! χ_FF (dissipation) and σ_FF (fluctuation).
//!
//! Fourier convention: χ(ω) = ∫dt χ(t) e^{+iωt} and
//! σ(t) = ∫dω/2π σ(ω) e^{−iωt}. Distributional objects (Im G, the local
//! vacuum χ) are kept structural, see [`DeltaComb`] and [`LocalChiCoeffs`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::PhysicalParams;

const GRID_UNIFORMITY_TOL: f64 = 1e-12;
const LIGHTCONE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    Time,
    Frequency,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    ChiFF,
    SigmaFF,
    SpectralDensity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Vacuum,
    Thermal,
}

/// A kernel sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledKernel {
    pub domain: Domain,
    pub kind: KernelKind,
    grid: Vec<f64>,
    values: Vec<Complex64>,
}

impl SampledKernel {
    pub fn new(
        domain: Domain,
        kind: KernelKind,
        grid: Vec<f64>,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::GridMismatch(format!(
                "{} grid points but {} values",
                grid.len(),
                values.len()
            )));
        }
        check_uniform(&grid)?;
        Ok(Self {
            domain,
            kind,
            grid,
            values,
        })
    }

    pub fn from_real(
        domain: Domain,
        kind: KernelKind,
        grid: Vec<f64>,
        values: &[f64],
    ) -> Result<Self> {
        let values = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::new(domain, kind, grid, values)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// True when the grid is symmetric about zero.
    pub fn is_symmetric(&self) -> bool {
        let n = self.grid.len();
        let scale = self
            .grid
            .iter()
            .fold(0.0_f64, |m, x| m.max(x.abs()))
            .max(f64::MIN_POSITIVE);
        (0..n).all(|i| (self.grid[i] + self.grid[n - 1 - i]).abs() <= GRID_UNIFORMITY_TOL * scale)
    }

    /// Largest imaginary magnitude relative to the largest modulus.
    pub fn imaginary_fraction(&self) -> f64 {
        let max = self.values.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
        if max == 0.0 {
            return 0.0;
        }
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.im.abs())) / max
    }
}

/// Builds an n-point uniform grid over `[min, max]`.
pub fn uniform_grid(min: f64, max: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(max > min) || !min.is_finite() || !max.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "need n >= 2 and min < max, got {min}:{max}:{n}"
        )));
    }
    let step = (max - min) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            if i == n - 1 {
                max
            } else {
                min + step * i as f64
            }
        })
        .collect())
}

fn check_uniform(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Ok(());
    }
    let step = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    if !(step > 0.0) {
        return Err(Error::InvalidGrid(
            "grid must be strictly increasing".into(),
        ));
    }
    let scale = step.max(grid[0].abs()).max(grid[grid.len() - 1].abs());
    for (i, w) in grid.windows(2).enumerate() {
        let d = w[1] - w[0];
        if (d - step).abs() > GRID_UNIFORMITY_TOL * scale {
            return Err(Error::InvalidGrid(format!("grid not uniform at index {i}")));
        }
    }
    Ok(())
}

/// One term `weight · δ^{(order)}(t − location)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaTerm {
    pub location: f64,
    pub weight: f64,
    pub order: u32,
}

/// A finite sum of Dirac deltas and their derivatives.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DeltaComb {
    pub terms: Vec<DeltaTerm>,
}

impl DeltaComb {
    pub fn total_weight(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }

    pub fn support(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.location).collect()
    }

    /// Applies the distribution to a smooth test function given its
    /// derivatives: `f(order, t)` returns the `order`-th derivative at `t`.
    pub fn apply(&self, f: impl Fn(u32, f64) -> f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let sign = if t.order % 2 == 0 { 1.0 } else { -1.0 };
                sign * t.weight * f(t.order, t.location)
            })
            .sum()
    }
}

/// Coefficients of the local vacuum dissipation kernel
/// χ(t) = c2 δ″(t) + c4 δ⁽⁴⁾(t) + c5 δ⁽⁵⁾(t).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalChiCoeffs {
    pub c2: f64,
    pub c4: f64,
    pub c5: f64,
}

impl LocalChiCoeffs {
    /// Fourier transform under χ(ω) = ∫dt χ(t)e^{iωt}; δ⁽ⁿ⁾ maps to (−iω)ⁿ.
    pub fn frequency_response(&self, omega: f64) -> Complex64 {
        let w2 = omega * omega;
        let w4 = w2 * w2;
        let re = -self.c2 * w2 + self.c4 * w4;
        let im = -self.c5 * w4 * omega;
        Complex64::new(re, im)
    }

    pub fn as_delta_comb(&self) -> DeltaComb {
        DeltaComb {
            terms: vec![
                DeltaTerm {
                    location: 0.0,
                    weight: self.c2,
                    order: 2,
                },
                DeltaTerm {
                    location: 0.0,
                    weight: self.c4,
                    order: 4,
                },
                DeltaTerm {
                    location: 0.0,
                    weight: self.c5,
                    order: 5,
                },
            ],
        }
    }
}

/// Re G at finite temperature,
/// (πT/8π²r)[coth(πT(Δt+r)) − coth(πT(Δt−r))].
pub fn green_re_thermal(r: f64, dt: f64, temperature: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::ZeroSeparation);
    }
    if (dt.abs() - r).abs() <= LIGHTCONE_TOL * r.max(dt.abs()) {
        return Err(Error::PoleOnLightcone);
    }
    if temperature <= 0.0 {
        return green_re_vacuum(r, dt);
    }
    let a = PI * temperature;
    let coth = |x: f64| 1.0 / x.tanh();
    Ok(a / (8.0 * PI * PI * r) * (coth(a * (dt + r)) - coth(a * (dt - r))))
}

/// Re G in vacuum, −1/(4π²(Δt² − r²)).
pub fn green_re_vacuum(r: f64, dt: f64) -> Result<f64> {
    let s = dt * dt - r * r;
    if s.abs() <= LIGHTCONE_TOL * (dt * dt).max(r * r) {
        return Err(Error::PoleOnLightcone);
    }
    Ok(-1.0 / (4.0 * PI * PI * s))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GreenImForm {
    /// δ(Δt + r) − δ(Δt − r), valid at any temperature.
    Symmetric,
    /// The retarded piece only.
    VacuumRetarded,
}

/// Im G as a delta comb in the time lag.
pub fn green_im(r: f64, form: GreenImForm) -> Result<DeltaComb> {
    if !(r > 0.0) {
        return Err(Error::ZeroSeparation);
    }
    let w = 1.0 / (8.0 * PI * PI * r);
    let terms = match form {
        GreenImForm::Symmetric => vec![
            DeltaTerm {
                location: -r,
                weight: w,
                order: 0,
            },
            DeltaTerm {
                location: r,
                weight: -w,
                order: 0,
            },
        ],
        GreenImForm::VacuumRetarded => vec![DeltaTerm {
            location: r,
            weight: -w,
            order: 0,
        }],
    };
    Ok(DeltaComb { terms })
}

/// Bose-Einstein occupation, zero at T = 0.
pub fn bose_einstein(k: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        0.0
    } else {
        1.0 / (k / temperature).exp_m1()
    }
}

/// Weights of g^>(k, ω) and g^<(k, ω) at a support point ω = ±k.
/// Any other ω carries zero weight.
pub fn g_greater_less(k: f64, omega: f64, temperature: f64) -> Result<(f64, f64)> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::InvalidParams(format!(
            "momentum must be positive, got {k}"
        )));
    }
    if temperature < 0.0 {
        return Err(Error::InvalidParams(
            "temperature must be non-negative".into(),
        ));
    }
    let n = bose_einstein(k, temperature);
    let norm = 1.0 / (2.0 * k);
    if omega == k {
        Ok(((1.0 + n) * norm, n * norm))
    } else if omega == -k {
        Ok((n * norm, (1.0 + n) * norm))
    } else {
        Ok((0.0, 0.0))
    }
}

pub fn chi_vacuum_local(params: &PhysicalParams) -> LocalChiCoeffs {
    let pref = params.area() / (48.0 * PI * PI);
    let cutoff = params.cutoff();
    LocalChiCoeffs {
        c2: pref * cutoff.powi(3),
        c4: -pref * cutoff / 10.0,
        c5: -pref / 15.0,
    }
}

fn check_cutoff(omega: f64, cutoff: f64) -> Result<()> {
    if omega.abs() > cutoff {
        return Err(Error::BeyondCutoff { omega, cutoff });
    }
    Ok(())
}

/// Frequency-domain vacuum dissipation kernel, defined for |ω| ≤ Λ.
pub fn chi_vacuum_freq(omega: f64, params: &PhysicalParams) -> Result<Complex64> {
    check_cutoff(omega, params.cutoff())?;
    Ok(chi_vacuum_local(params).frequency_response(omega))
}

/// Vacuum force spectrum S(ω) = (A/720π²)ω⁵ on 0 ≤ ω ≤ Λ.
pub fn sigma_vacuum_spectrum(omega: f64, params: &PhysicalParams) -> Result<f64> {
    if omega < 0.0 {
        return Err(Error::InvalidParams(format!(
            "spectrum is one-sided, got omega = {omega}"
        )));
    }
    check_cutoff(omega, params.cutoff())?;
    Ok(params.area() / (720.0 * PI * PI) * omega.powi(5))
}

/// Vacuum force autocovariance (1/π)∫₀^Λ S(ω) cos(ωτ) dω.
pub fn sigma_vacuum_time(tau: f64, params: &PhysicalParams) -> f64 {
    let coeff = params.area() / (720.0 * PI * PI);
    coeff / PI * cos_moment5(params.cutoff(), tau)
}

/// ∫₀^Λ ω⁵ cos(ωτ) dω.
pub(crate) fn cos_moment5(cutoff: f64, tau: f64) -> f64 {
    let x = cutoff * tau.abs();
    if x < 2.0 {
        // Λ⁶ Σ (−1)ⁿ x²ⁿ / ((2n)! (2n + 6))
        let mut sum = 0.0;
        let mut term = 1.0;
        for n in 0..40 {
            sum += term / (2 * n + 6) as f64;
            term *= -x * x / (((2 * n + 1) * (2 * n + 2)) as f64);
        }
        return cutoff.powi(6) * sum;
    }
    let t = tau.abs();
    let (s, c) = x.sin_cos();
    let l = cutoff;
    let antider_top = s * (l.powi(5) / t - 20.0 * l.powi(3) / t.powi(3) + 120.0 * l / t.powi(5))
        + c * (5.0 * l.powi(4) / t.powi(2) - 60.0 * l * l / t.powi(4) + 120.0 / t.powi(6));
    antider_top - 120.0 / t.powi(6)
}

/// Leading high-temperature fluctuation kernel (16l²/π²τ_B⁶) e^{−4|Δt|/τ_B}.
pub fn sigma_thermal_time(dt: f64, params: &PhysicalParams) -> Result<f64> {
    let tau_b = params.tau_b()?;
    let l = params.radius();
    Ok(16.0 * l * l / (PI * PI * tau_b.powi(6)) * (-4.0 * dt.abs() / tau_b).exp())
}

/// Three-exponential thermal kernel including the 1/(l/τ_B)³ and
/// 1/(l/τ_B)⁴ corrections.
pub fn sigma_thermal_time_full(dt: f64, params: &PhysicalParams) -> Result<f64> {
    let tau_b = params.tau_b()?;
    let l = params.radius();
    let x = l / tau_b;
    let pref = 16.0 * l * l / (PI * PI * tau_b.powi(6));
    let s = dt.abs();
    let main = (1.0 + 1.0 / (4.0 * x) - 1.0 / (32.0 * x.powi(4))) * (-4.0 * s / tau_b).exp();
    let inner =
        (1.0 / (16.0 * x.powi(3)) - 1.0 / (64.0 * x.powi(4))) * (-4.0 * (s - l) / tau_b).exp();
    let outer =
        (1.0 / (16.0 * x.powi(3)) + 1.0 / (64.0 * x.powi(4))) * (-4.0 * (s + l) / tau_b).exp();
    Ok(pref * (main - inner + outer))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SigmaThermalVariant {
    #[default]
    Leading,
    Full,
}

pub fn sigma_thermal_time_variant(
    dt: f64,
    params: &PhysicalParams,
    variant: SigmaThermalVariant,
) -> Result<f64> {
    match variant {
        SigmaThermalVariant::Leading => sigma_thermal_time(dt, params),
        SigmaThermalVariant::Full => sigma_thermal_time_full(dt, params),
    }
}

/// Whether the high-temperature approximations apply (l ≫ τ_B); callers
/// should warn when this is false.
pub fn high_temperature_regime(params: &PhysicalParams) -> bool {
    params
        .tau_b()
        .map(|tau| params.radius() > 10.0 * tau)
        .unwrap_or(false)
}

/// White-noise strength D = 8π²AT⁵.
pub fn sigma_thermal_white_strength(params: &PhysicalParams) -> Result<f64> {
    let t = params.temperature();
    if t <= 0.0 {
        return Err(Error::ZeroTemperature);
    }
    Ok(8.0 * PI * PI * params.area() * t.powi(5))
}

/// The same strength from the integral of the exponential kernel,
/// 8l²/(π²τ_B⁵).
pub fn sigma_thermal_kernel_integral(params: &PhysicalParams) -> Result<f64> {
    let tau_b = params.tau_b()?;
    let l = params.radius();
    Ok(8.0 * l * l / (PI * PI * tau_b.powi(5)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum GammaMode {
    /// γ = D/(2T), consistent with the high-temperature FDT.
    #[default]
    FdtConsistent,
    /// γ = 8π²AT⁴ as quoted for the damping coefficient.
    Literal,
}

pub fn gamma_thermal(params: &PhysicalParams, mode: GammaMode) -> Result<f64> {
    let d = sigma_thermal_white_strength(params)?;
    let fdt = d / (2.0 * params.temperature());
    Ok(match mode {
        GammaMode::FdtConsistent => fdt,
        GammaMode::Literal => 8.0 * PI * PI * params.area() * params.temperature().powi(4),
    })
}

/// Ohmic thermal dissipation kernel χ(ω) = iγω (no static shift).
pub fn chi_thermal_freq(omega: f64, params: &PhysicalParams, mode: GammaMode) -> Result<Complex64> {
    Ok(Complex64::new(0.0, gamma_thermal(params, mode)? * omega))
}

/// Fluctuation spectrum matched to the ohmic kernel at all frequencies,
/// γω coth(ω/2T); reduces to D = 2γT at ω → 0.
pub fn sigma_thermal_ohmic(omega: f64, params: &PhysicalParams, mode: GammaMode) -> Result<f64> {
    let gamma = gamma_thermal(params, mode)?;
    let t = params.temperature();
    if omega == 0.0 {
        return Ok(2.0 * gamma * t);
    }
    let x = omega / (2.0 * t);
    Ok(gamma * omega / x.tanh())
}

/// Fourier transform of the leading exponential kernel (a Lorentzian).
pub fn sigma_thermal_lorentzian(omega: f64, params: &PhysicalParams) -> Result<f64> {
    let tau_b = params.tau_b()?;
    let tc = tau_b / 4.0;
    let var = sigma_thermal_time(0.0, params)?;
    Ok(2.0 * var * tc / (1.0 + (omega * tc).powi(2)))
}

/// Samples one of the closed-form kernels on a grid.
///
/// Distributional kernels (time-domain χ) are rejected.
pub fn sample_kernel(
    domain: Domain,
    kind: KernelKind,
    regime: Regime,
    grid: Vec<f64>,
    params: &PhysicalParams,
    gamma_mode: GammaMode,
    variant: SigmaThermalVariant,
) -> Result<SampledKernel> {
    let values: Vec<Complex64> = match (domain, kind, regime) {
        (Domain::Time, KernelKind::ChiFF, _) => return Err(Error::Distributional),
        (_, KernelKind::SpectralDensity, _) => {
            return Err(Error::DomainMismatch(
                "spectral density is derived from chi".into(),
            ))
        }
        (Domain::Time, KernelKind::SigmaFF, Regime::Vacuum) => grid
            .iter()
            .map(|&t| Complex64::new(sigma_vacuum_time(t, params), 0.0))
            .collect(),
        (Domain::Time, KernelKind::SigmaFF, Regime::Thermal) => grid
            .iter()
            .map(|&t| {
                sigma_thermal_time_variant(t, params, variant).map(|v| Complex64::new(v, 0.0))
            })
            .collect::<Result<_>>()?,
        (Domain::Frequency, KernelKind::ChiFF, Regime::Vacuum) => grid
            .iter()
            .map(|&w| chi_vacuum_freq(w, params))
            .collect::<Result<_>>()?,
        (Domain::Frequency, KernelKind::ChiFF, Regime::Thermal) => grid
            .iter()
            .map(|&w| chi_thermal_freq(w, params, gamma_mode))
            .collect::<Result<_>>()?,
        (Domain::Frequency, KernelKind::SigmaFF, Regime::Vacuum) => grid
            .iter()
            .map(|&w| sigma_vacuum_spectrum(w.abs(), params).map(|v| Complex64::new(v, 0.0)))
            .collect::<Result<_>>()?,
        (Domain::Frequency, KernelKind::SigmaFF, Regime::Thermal) => grid
            .iter()
            .map(|&w| sigma_thermal_lorentzian(w, params).map(|v| Complex64::new(v, 0.0)))
            .collect::<Result<_>>()?,
    };
    SampledKernel::new(domain, kind, grid, values)
}
