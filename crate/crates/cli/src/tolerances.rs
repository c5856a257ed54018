//! Pass/fail bands, versioned with the tool. A `--tol-file` of
//! `name = value` lines may override individual bands for research runs.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::config::{ConfigError, ConfigErrorKind};

/// Bumped whenever a default band changes.
pub const TOLERANCE_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative error of σ = Im χ in vacuum.
    pub fdt_vacuum: f64,
    /// Relative error of the coth relation on matched pairs.
    pub fdt_thermal: f64,
    /// Agreement of the thermal check with the vacuum one as T → 0.
    pub fdt_zero_t_limit: f64,
    pub kms: f64,
    pub white_strength: f64,
    /// Standard errors allowed between synthesized and target covariance.
    pub noise_se: f64,
    pub decay_rel: f64,
    /// Oracle-vs-integrator frequency shift.
    pub shift_rel: f64,
    pub heating_rel: f64,
    /// Standard errors allowed between heating slopes at two cutoffs.
    pub heating_invariance_se: f64,
    pub equipartition_rel: f64,
    pub order_of_magnitude: f64,
    /// Upper bound on quanta radiated per cycle.
    pub energy_quanta: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            fdt_vacuum: 1e-12,
            fdt_thermal: 1e-12,
            fdt_zero_t_limit: 1e-6,
            kms: 1e-14,
            white_strength: 1e-12,
            noise_se: 3.0,
            decay_rel: 0.01,
            shift_rel: 0.01,
            heating_rel: 0.05,
            heating_invariance_se: 2.0,
            equipartition_rel: 0.02,
            order_of_magnitude: 3.0,
            energy_quanta: 1e-4,
        }
    }
}

impl Tolerances {
    fn fields_mut(&mut self) -> [(&'static str, &mut f64); 13] {
        [
            ("fdt_vacuum", &mut self.fdt_vacuum),
            ("fdt_thermal", &mut self.fdt_thermal),
            ("fdt_zero_t_limit", &mut self.fdt_zero_t_limit),
            ("kms", &mut self.kms),
            ("white_strength", &mut self.white_strength),
            ("noise_se", &mut self.noise_se),
            ("decay_rel", &mut self.decay_rel),
            ("shift_rel", &mut self.shift_rel),
            ("heating_rel", &mut self.heating_rel),
            ("heating_invariance_se", &mut self.heating_invariance_se),
            ("equipartition_rel", &mut self.equipartition_rel),
            ("order_of_magnitude", &mut self.order_of_magnitude),
            ("energy_quanta", &mut self.energy_quanta),
        ]
    }

    /// Applies overrides from a tolerance file and returns the overridden
    /// entries, sorted by name.
    pub fn apply_overrides(&mut self, text: &str) -> Result<BTreeMap<String, f64>, ConfigError> {
        let mut applied = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fail = |kind| ConfigError { line, kind };
            let (key, value) = content.split_once('=').ok_or_else(|| {
                fail(ConfigErrorKind::SyntaxError(format!(
                    "expected `name = value`, got `{content}`"
                )))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let v: f64 = value
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite() && *v > 0.0)
                .ok_or_else(|| {
                    fail(ConfigErrorKind::InvalidValue {
                        key: key.to_string(),
                        reason: format!("expected a positive number, got `{value}`"),
                    })
                })?;
            let mut fields = self.fields_mut();
            let slot = fields
                .iter_mut()
                .find(|(name, _)| *name == key)
                .ok_or_else(|| fail(ConfigErrorKind::UnknownKey(key.to_string())))?;
            *slot.1 = v;
            if applied.insert(key.to_string(), v).is_some() {
                return Err(fail(ConfigErrorKind::ConflictingKeys(
                    key.to_string(),
                    key.to_string(),
                )));
            }
        }
        Ok(applied)
    }
}
