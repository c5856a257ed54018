//! Physical constants of the mirror-field system and their dimensionless
//! simulation form.
//!
//! Internally everything is in natural units (ħ = c = k_B = 1) with the
//! electron-volt as the energy unit: masses, frequencies, cutoffs and
//! temperatures are in eV, lengths and times in eV⁻¹, areas in eV⁻².
//! [`SiConversion`] is the only bridge to laboratory units.
//!
//! Dynamics modules never see [`PhysicalParams`] directly. They consume
//! [`ReducedParams`], which fixes the gauge ω₀ = m = 1.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default upper bound on the vacuum coupling ε.
pub const DEFAULT_MAX_EPSILON: f64 = 0.1;

/// Default dimensionless oscillation amplitude l₀ω₀.
pub const DEFAULT_AMP0: f64 = 1e-3;

const AREA_RADIUS_TOL: f64 = 1e-12;

/// Mirror and field parameters in natural units (eV based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    mass: f64,
    area: f64,
    radius: f64,
    omega0: f64,
    cutoff: f64,
    temperature: f64,
    l0: f64,
    theta0: f64,
}

impl PhysicalParams {
    /// Builds a parameter set; the disk radius follows from `A = π l²`,
    /// the amplitude defaults to `l₀ω₀ = 10⁻³` and the phase offset to 0.
    pub fn new(mass: f64, area: f64, omega0: f64, cutoff: f64, temperature: f64) -> Result<Self> {
        let p = Self {
            mass,
            area,
            radius: (area / PI).sqrt(),
            omega0,
            cutoff,
            temperature,
            l0: DEFAULT_AMP0 / omega0,
            theta0: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Replaces the radius; the area must already satisfy `A = π l²`.
    pub fn with_radius(mut self, radius: f64) -> Result<Self> {
        self.radius = radius;
        self.validate()?;
        Ok(self)
    }

    pub fn with_amplitude(mut self, l0: f64) -> Result<Self> {
        self.l0 = l0;
        self.validate()?;
        Ok(self)
    }

    pub fn with_phase(mut self, theta0: f64) -> Result<Self> {
        self.theta0 = theta0;
        self.validate()?;
        Ok(self)
    }

    pub fn with_temperature(mut self, temperature: f64) -> Result<Self> {
        self.temperature = temperature;
        self.validate()?;
        Ok(self)
    }

    /// Unchecked constructor for the simulation gauge, where a zero
    /// coupling (free oscillator) is legitimate.
    pub(crate) fn sim_gauge(
        area: f64,
        cutoff: f64,
        temperature: f64,
        amp0: f64,
        phase0: f64,
    ) -> Self {
        Self {
            mass: 1.0,
            area,
            radius: (area / PI).sqrt(),
            omega0: 1.0,
            cutoff,
            temperature,
            l0: amp0,
            theta0: phase0,
        }
    }

    fn validate(&self) -> Result<()> {
        let fields = [
            ("m", self.mass),
            ("A", self.area),
            ("l", self.radius),
            ("omega0", self.omega0),
            ("Lambda", self.cutoff),
            ("T", self.temperature),
            ("l0", self.l0),
            ("theta0", self.theta0),
        ];
        if let Some((name, _)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("{name} is not finite")));
        }
        for (name, value) in [
            ("m", self.mass),
            ("A", self.area),
            ("omega0", self.omega0),
            ("Lambda", self.cutoff),
        ] {
            if value <= 0.0 {
                return Err(Error::InvalidParams(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        if self.temperature < 0.0 {
            return Err(Error::InvalidParams(format!(
                "T must be non-negative, got {}",
                self.temperature
            )));
        }
        if self.l0 < 0.0 {
            return Err(Error::InvalidParams(format!(
                "l0 must be non-negative, got {}",
                self.l0
            )));
        }
        let disk = PI * self.radius * self.radius;
        if ((disk - self.area) / self.area).abs() >= AREA_RADIUS_TOL {
            return Err(Error::InvalidParams(format!(
                "area {} inconsistent with radius {} (pi l^2 = {disk})",
                self.area, self.radius
            )));
        }
        Ok(())
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn area(&self) -> f64 {
        self.area
    }
    pub fn radius(&self) -> f64 {
        self.radius
    }
    pub fn omega0(&self) -> f64 {
        self.omega0
    }
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }
    pub fn temperature(&self) -> f64 {
        self.temperature
    }
    pub fn l0(&self) -> f64 {
        self.l0
    }
    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    /// Inverse temperature β = 1/T (infinite in vacuum).
    pub fn beta(&self) -> f64 {
        1.0 / self.temperature
    }

    /// Thermal correlation time τ_B = 1/(πT).
    pub fn tau_b(&self) -> Result<f64> {
        if self.temperature <= 0.0 {
            return Err(Error::ZeroTemperature);
        }
        Ok(1.0 / (PI * self.temperature))
    }

    /// Vacuum coupling ε = Aω₀³/(720π²m).
    pub fn epsilon(&self) -> f64 {
        self.area * self.omega0.powi(3) / (720.0 * PI * PI * self.mass)
    }
}

/// Dimensionless simulation parameters (gauge ω₀ = m = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedParams {
    /// ε = Aω₀³/(720π²m)
    pub epsilon: f64,
    /// Λ/ω₀
    pub lambda: f64,
    /// k_BT/(ħω₀)
    pub theta_t: f64,
    /// l₀ω₀
    pub amp0: f64,
    /// ω₀θ₀
    pub phase0: f64,
}

impl ReducedParams {
    pub fn new(epsilon: f64, lambda: f64, theta_t: f64, amp0: f64) -> Result<Self> {
        Self::with_guard(epsilon, lambda, theta_t, amp0, DEFAULT_MAX_EPSILON)
    }

    pub fn with_guard(
        epsilon: f64,
        lambda: f64,
        theta_t: f64,
        amp0: f64,
        max_epsilon: f64,
    ) -> Result<Self> {
        let p = Self {
            epsilon,
            lambda,
            theta_t,
            amp0,
            phase0: 0.0,
        };
        p.validate(max_epsilon)?;
        Ok(p)
    }

    pub fn with_phase(mut self, phase0: f64) -> Result<Self> {
        if !phase0.is_finite() {
            return Err(Error::InvalidParams("phase0 is not finite".into()));
        }
        self.phase0 = phase0;
        Ok(self)
    }

    pub fn validate(&self, max_epsilon: f64) -> Result<()> {
        for (name, value) in [
            ("epsilon", self.epsilon),
            ("lambda", self.lambda),
            ("theta_t", self.theta_t),
            ("amp0", self.amp0),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidParams(format!(
                    "{name} must be finite and non-negative, got {value}"
                )));
            }
        }
        if !self.phase0.is_finite() {
            return Err(Error::InvalidParams("phase0 is not finite".into()));
        }
        if self.epsilon >= max_epsilon {
            return Err(Error::PerturbativityViolation {
                epsilon: self.epsilon,
                limit: max_epsilon,
            });
        }
        Ok(())
    }

    /// Mirror area in simulation units, A = 720π²ε.
    pub fn area(&self) -> f64 {
        720.0 * PI * PI * self.epsilon
    }

    /// RG decay rate Γ = εω₀.
    pub fn decay_rate(&self) -> f64 {
        self.epsilon
    }

    /// The simulation-gauge parameter set (m = ω₀ = 1) seen by the kernels.
    pub fn sim_physical(&self) -> PhysicalParams {
        PhysicalParams::sim_gauge(
            self.area(),
            self.lambda,
            self.theta_t,
            self.amp0,
            self.phase0,
        )
    }
}

/// Reduces a physical parameter set to simulation form with the default
/// perturbativity guard.
pub fn reduce(params: &PhysicalParams) -> Result<ReducedParams> {
    reduce_with_guard(params, DEFAULT_MAX_EPSILON)
}

pub fn reduce_with_guard(params: &PhysicalParams, max_epsilon: f64) -> Result<ReducedParams> {
    params.validate()?;
    let epsilon = params.epsilon();
    if epsilon >= max_epsilon {
        return Err(Error::PerturbativityViolation {
            epsilon,
            limit: max_epsilon,
        });
    }
    let m_r = renormalized_mass_unchecked(params);
    if m_r <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "renormalized mass {m_r} is not positive"
        )));
    }
    let reduced = ReducedParams {
        epsilon,
        lambda: params.cutoff / params.omega0,
        theta_t: params.temperature / params.omega0,
        amp0: params.l0 * params.omega0,
        phase0: params.theta0 * params.omega0,
    };
    reduced.validate(max_epsilon)?;
    Ok(reduced)
}

fn renormalized_mass_unchecked(params: &PhysicalParams) -> f64 {
    params.mass - params.area / (24.0 * PI * PI) * params.cutoff.powi(3)
}

/// m_R = m − (A/24π²)Λ³.
pub fn renormalized_mass(params: &PhysicalParams) -> Result<f64> {
    let m_r = renormalized_mass_unchecked(params);
    if m_r <= 0.0 {
        return Err(Error::NegativeRenormalizedMass(m_r));
    }
    Ok(m_r)
}

/// Thermal mass correction Δm_T = −A T³ (cutoff replaced by the thermal energy).
pub fn thermal_mass_shift(params: &PhysicalParams) -> Result<f64> {
    if params.temperature <= 0.0 {
        return Err(Error::ZeroTemperature);
    }
    Ok(-params.area * params.temperature.powi(3))
}

/// Conversion factors between eV-based natural units and SI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiConversion {
    /// seconds per eV⁻¹
    pub time_s: f64,
    /// meters per eV⁻¹
    pub length_m: f64,
    /// kilograms per eV
    pub mass_kg: f64,
    /// kelvin per eV
    pub temperature_k: f64,
}

impl SiConversion {
    pub const HBAR: f64 = 1.054_571_817e-34;
    pub const C: f64 = 299_792_458.0;
    pub const K_B: f64 = 1.380_649e-23;
    pub const EV: f64 = 1.602_176_634e-19;

    pub fn new() -> Self {
        Self {
            time_s: Self::HBAR / Self::EV,
            length_m: Self::HBAR * Self::C / Self::EV,
            mass_kg: Self::EV / (Self::C * Self::C),
            temperature_k: Self::EV / Self::K_B,
        }
    }

    pub fn time_to_si(&self, t: f64) -> f64 {
        t * self.time_s
    }
    pub fn time_from_si(&self, seconds: f64) -> f64 {
        seconds / self.time_s
    }
    pub fn length_to_si(&self, l: f64) -> f64 {
        l * self.length_m
    }
    pub fn length_from_si(&self, meters: f64) -> f64 {
        meters / self.length_m
    }
    pub fn area_to_si(&self, a: f64) -> f64 {
        a * self.length_m * self.length_m
    }
    pub fn area_from_si(&self, square_meters: f64) -> f64 {
        square_meters / (self.length_m * self.length_m)
    }
    pub fn mass_to_si(&self, m: f64) -> f64 {
        m * self.mass_kg
    }
    pub fn mass_from_si(&self, kg: f64) -> f64 {
        kg / self.mass_kg
    }
    pub fn temperature_to_kelvin(&self, t: f64) -> f64 {
        t * self.temperature_k
    }
    pub fn temperature_from_kelvin(&self, kelvin: f64) -> f64 {
        kelvin / self.temperature_k
    }
    pub fn temperature_to_kev(&self, t: f64) -> f64 {
        t * 1e-3
    }
    pub fn temperature_from_kev(&self, kev: f64) -> f64 {
        kev * 1e3
    }
    /// Angular frequency in s⁻¹ to eV.
    pub fn frequency_from_si(&self, per_second: f64) -> f64 {
        per_second * self.time_s
    }
    pub fn frequency_to_si(&self, omega: f64) -> f64 {
        omega / self.time_s
    }
}

impl Default for SiConversion {
    fn default() -> Self {
        Self::new()
    }
}

/// Laboratory-unit inputs, as they appear in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiInputs {
    pub m_kg: f64,
    pub area_cm2: f64,
    pub omega0_per_s: f64,
    pub lambda_ratio: f64,
    pub t_kev: f64,
    pub l0_cm: Option<f64>,
    pub theta0_s: Option<f64>,
}

impl SiInputs {
    pub fn to_params(&self) -> Result<PhysicalParams> {
        let si = SiConversion::new();
        let omega0 = si.frequency_from_si(self.omega0_per_s);
        let mut p = PhysicalParams::new(
            si.mass_from_si(self.m_kg),
            si.area_from_si(self.area_cm2 * 1e-4),
            omega0,
            self.lambda_ratio * omega0,
            si.temperature_from_kev(self.t_kev),
        )?;
        if let Some(l0) = self.l0_cm {
            p = p.with_amplitude(si.length_from_si(l0 * 1e-2))?;
        }
        if let Some(theta0) = self.theta0_s {
            p = p.with_phase(si.time_from_si(theta0))?;
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reduce_rejects_strong_coupling() {
        let p = PhysicalParams::new(1.0, 720.0 * PI * PI, 1.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            reduce(&p),
            Err(Error::PerturbativityViolation { .. })
        ));
    }

    #[test]
    fn reduce_epsilon_value() {
        let p = PhysicalParams::new(1.0, 7.2 * PI * PI, 1.0, 1.0, 0.0).unwrap();
        let r = reduce(&p).unwrap();
        assert_relative_eq!(r.epsilon, 0.01, max_relative = 1e-15);
        assert_eq!(r.lambda, 1.0);
        assert_eq!(r.theta_t, 0.0);
        assert_relative_eq!(r.amp0, DEFAULT_AMP0, max_relative = 1e-15);
    }

    #[test]
    fn zero_area_is_invalid() {
        assert!(matches!(
            PhysicalParams::new(1.0, 0.0, 1.0, 1.0, 0.0),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn radius_must_match_area() {
        let p = PhysicalParams::new(1.0, PI, 1.0, 1.0, 0.0).unwrap();
        assert!(p.with_radius(1.0).is_ok());
        assert!(p.with_radius(1.001).is_err());
    }

    #[test]
    fn reduce_is_scale_covariant() {
        let a = PhysicalParams::new(2.0, 3.0, 0.7, 1.1, 0.2).unwrap();
        let b = PhysicalParams::new(2.0 * 37.0, 3.0 * 37.0, 0.7, 1.1, 0.2).unwrap();
        assert_relative_eq!(
            reduce(&a).unwrap().epsilon,
            reduce(&b).unwrap().epsilon,
            max_relative = 1e-15
        );
    }

    #[test]
    fn renormalized_mass_closed_form() {
        let p = PhysicalParams::new(1.0, 24.0 * PI * PI, 1.0, 0.5, 0.0).unwrap();
        assert_relative_eq!(renormalized_mass(&p).unwrap(), 0.875, max_relative = 1e-14);
        let edge = PhysicalParams::new(1.0, 24.0 * PI * PI, 1.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            renormalized_mass(&edge),
            Err(Error::NegativeRenormalizedMass(_))
        ));
        let tiny = PhysicalParams::new(1.0, 24.0 * PI * PI, 1.0, 1e-200, 0.0).unwrap();
        assert_eq!(renormalized_mass(&tiny).unwrap(), 1.0);
    }

    #[test]
    fn renormalized_mass_monotone() {
        let mut prev = f64::INFINITY;
        for i in 1..50 {
            let cutoff = i as f64 * 0.02;
            let p = PhysicalParams::new(1.0, 3.0, 1.0, cutoff, 0.0).unwrap();
            let m = renormalized_mass(&p).unwrap();
            assert!(m < prev);
            prev = m;
        }
        let small = PhysicalParams::new(1.0, 1.0, 1.0, 0.5, 0.0).unwrap();
        let large = PhysicalParams::new(1.0, 2.0, 1.0, 0.5, 0.0).unwrap();
        assert!(renormalized_mass(&large).unwrap() < renormalized_mass(&small).unwrap());
    }

    #[test]
    fn thermal_mass_shift_scaling() {
        let p = PhysicalParams::new(1.0, 2.0, 1.0, 1.0, 0.3).unwrap();
        let q = p.with_temperature(0.6).unwrap();
        assert_relative_eq!(
            thermal_mass_shift(&q).unwrap() / thermal_mass_shift(&p).unwrap(),
            8.0,
            max_relative = 1e-14
        );
        let cold = p.with_temperature(0.0).unwrap();
        assert_eq!(thermal_mass_shift(&cold), Err(Error::ZeroTemperature));
    }

    #[test]
    fn si_round_trip() {
        let si = SiConversion::new();
        for x in [1e-30, 3.7, 1e25] {
            assert_relative_eq!(si.time_to_si(si.time_from_si(x)), x, max_relative = 1e-12);
            assert_relative_eq!(
                si.length_to_si(si.length_from_si(x)),
                x,
                max_relative = 1e-12
            );
            assert_relative_eq!(si.mass_to_si(si.mass_from_si(x)), x, max_relative = 1e-12);
            assert_relative_eq!(
                si.temperature_to_kelvin(si.temperature_from_kelvin(x)),
                x,
                max_relative = 1e-12
            );
            assert_relative_eq!(si.area_to_si(si.area_from_si(x)), x, max_relative = 1e-12);
        }
        // 1 keV is about 1.16e7 K
        assert_relative_eq!(
            si.temperature_to_kelvin(1e3),
            1.160_451_812e7,
            max_relative = 1e-9
        );
    }
}
