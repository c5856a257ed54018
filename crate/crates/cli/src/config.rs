//! `key = value` scenario configuration.
//!
//! One assignment per line; `#` starts a comment. A file holds either a
//! physical parameter block (laboratory units) or a reduced block
//! (simulation units), never both. Every error names the line it was
//! found on.

use std::collections::BTreeMap;
use std::fmt;

use mirrorlang_core::kernels::{GammaMode, SigmaThermalVariant};
use thiserror::Error;

const PHYSICAL_KEYS: &[&str] = &[
    "m_kg",
    "area_cm2",
    "omega0_per_s",
    "T_keV",
    "l0_cm",
    "theta0_s",
];
const PHYSICAL_REQUIRED: &[&str] = &["m_kg", "area_cm2", "omega0_per_s", "T_keV"];
const REDUCED_KEYS: &[&str] = &["epsilon", "amp0", "theta_t", "phase0"];
const OTHER_KEYS: &[&str] = &[
    "scenario",
    "lambda_ratio",
    "t_max",
    "dt",
    "n_paths",
    "seed",
    "gamma_mode",
    "sigma_variant",
    "switch_on",
    "thermal_noise",
    "lambda_check",
    "n_omega",
    "path_files",
    "out_dir",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ConfigError {
    /// 1-based; 0 when the problem is the absence of a line.
    pub line: usize,
    pub kind: ConfigErrorKind,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.kind)
        } else {
            write!(f, "line {}: {}", self.line, self.kind)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigErrorKind {
    #[error("syntax error: {0}")]
    SyntaxError(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("`{0}` conflicts with `{1}`")]
    ConflictingKeys(String, String),
    #[error("missing required key `{0}`")]
    MissingRequired(String),
    #[error("invalid value for `{key}`: {reason}")]
    InvalidValue { key: String, reason: String },
}

fn err(line: usize, kind: ConfigErrorKind) -> ConfigError {
    ConfigError { line, kind }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Scenario {
    Kernels,
    FdtCheck,
    Noise,
    Decay,
    Heating,
    Thermal,
    Report,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Kernels => "kernels",
            Scenario::FdtCheck => "fdt-check",
            Scenario::Noise => "noise",
            Scenario::Decay => "decay",
            Scenario::Heating => "heating",
            Scenario::Thermal => "thermal",
            Scenario::Report => "report",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [
            Scenario::Kernels,
            Scenario::FdtCheck,
            Scenario::Noise,
            Scenario::Decay,
            Scenario::Heating,
            Scenario::Thermal,
            Scenario::Report,
        ]
        .into_iter()
        .find(|sc| sc.name() == s)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThermalNoise {
    #[default]
    White,
    Ou,
}

/// Laboratory-unit parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalBlock {
    pub m_kg: f64,
    pub area_cm2: f64,
    pub omega0_per_s: f64,
    pub t_kev: f64,
    pub l0_cm: Option<f64>,
    pub theta0_s: Option<f64>,
}

/// Simulation-unit parameters (ω₀ = m = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedBlock {
    pub epsilon: f64,
    pub amp0: f64,
    pub theta_t: f64,
    pub phase0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamBlock {
    Physical(PhysicalBlock),
    Reduced(ReducedBlock),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScenarioConfig {
    pub scenario: Option<Scenario>,
    pub params: Option<ParamBlock>,
    pub lambda_ratio: Option<f64>,
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub n_paths: Option<usize>,
    pub seed: Option<u64>,
    pub gamma_mode: Option<GammaMode>,
    pub sigma_variant: Option<SigmaThermalVariant>,
    pub switch_on: Option<f64>,
    pub thermal_noise: Option<ThermalNoise>,
    pub lambda_check: Option<f64>,
    pub n_omega: Option<usize>,
    pub path_files: Option<usize>,
    pub out_dir: Option<String>,
}

struct Entry {
    line: usize,
    value: String,
}

/// Parses and validates a configuration, stopping at the first error.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| {
            err(
                line,
                ConfigErrorKind::SyntaxError(format!("expected `key = value`, got `{content}`")),
            )
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(err(
                line,
                ConfigErrorKind::SyntaxError(format!("malformed key `{key}`")),
            ));
        }
        if value.is_empty() {
            return Err(err(
                line,
                ConfigErrorKind::SyntaxError(format!("`{key}` has no value")),
            ));
        }
        if !PHYSICAL_KEYS.contains(&key)
            && !REDUCED_KEYS.contains(&key)
            && !OTHER_KEYS.contains(&key)
        {
            return Err(err(line, ConfigErrorKind::UnknownKey(key.to_string())));
        }
        if entries.contains_key(key) {
            return Err(err(
                line,
                ConfigErrorKind::ConflictingKeys(key.to_string(), key.to_string()),
            ));
        }
        entries.insert(
            key.to_string(),
            Entry {
                line,
                value: value.to_string(),
            },
        );
    }

    let first_of = |keys: &[&str]| {
        entries
            .iter()
            .filter(|(k, _)| keys.contains(&k.as_str()))
            .min_by_key(|(_, e)| e.line)
            .map(|(k, e)| (k.clone(), e.line))
    };
    let physical = first_of(PHYSICAL_KEYS);
    let reduced = first_of(REDUCED_KEYS);
    if let (Some((pk, pl)), Some((rk, rl))) = (&physical, &reduced) {
        let (line, a, b) = if pl > rl {
            (*pl, pk, rk)
        } else {
            (*rl, rk, pk)
        };
        return Err(err(
            line,
            ConfigErrorKind::ConflictingKeys(a.clone(), b.clone()),
        ));
    }

    let p = Parser { entries: &entries };
    let params = if physical.is_some() {
        if let Some(missing) = PHYSICAL_REQUIRED
            .iter()
            .find(|k| !entries.contains_key(**k))
        {
            return Err(err(
                0,
                ConfigErrorKind::MissingRequired(missing.to_string()),
            ));
        }
        Some(ParamBlock::Physical(PhysicalBlock {
            m_kg: p.positive("m_kg")?.unwrap(),
            area_cm2: p.positive("area_cm2")?.unwrap(),
            omega0_per_s: p.positive("omega0_per_s")?.unwrap(),
            t_kev: p.non_negative("T_keV")?.unwrap(),
            l0_cm: p.non_negative("l0_cm")?,
            theta0_s: p.finite("theta0_s")?,
        }))
    } else if reduced.is_some() {
        if !entries.contains_key("epsilon") {
            return Err(err(0, ConfigErrorKind::MissingRequired("epsilon".into())));
        }
        Some(ParamBlock::Reduced(ReducedBlock {
            epsilon: p.non_negative("epsilon")?.unwrap(),
            amp0: p
                .non_negative("amp0")?
                .unwrap_or(mirrorlang_core::params::DEFAULT_AMP0),
            theta_t: p.non_negative("theta_t")?.unwrap_or(0.0),
            phase0: p.finite("phase0")?.unwrap_or(0.0),
        }))
    } else {
        None
    };

    let config = ScenarioConfig {
        scenario: p.choice("scenario", Scenario::parse)?,
        params,
        lambda_ratio: p.positive("lambda_ratio")?,
        t_max: p.positive("t_max")?,
        dt: p.positive("dt")?,
        n_paths: p.count("n_paths", 2)?,
        seed: p.seed()?,
        gamma_mode: p.choice("gamma_mode", parse_gamma_mode)?,
        sigma_variant: p.choice("sigma_variant", parse_sigma_variant)?,
        switch_on: p.non_negative("switch_on")?,
        thermal_noise: p.choice("thermal_noise", parse_thermal_noise)?,
        lambda_check: p.positive("lambda_check")?,
        n_omega: p.count("n_omega", 2)?,
        path_files: p.count("path_files", 0)?,
        out_dir: entries.get("out_dir").map(|e| e.value.clone()),
    };
    if let (Some(_), None) = (config.n_paths, config.seed) {
        let line = entries["n_paths"].line;
        return Err(err(line, ConfigErrorKind::MissingRequired("seed".into())));
    }
    Ok(config)
}

pub fn parse_gamma_mode(s: &str) -> Option<GammaMode> {
    match s {
        "fdt" | "fdt_consistent" => Some(GammaMode::FdtConsistent),
        "literal" => Some(GammaMode::Literal),
        _ => None,
    }
}

pub fn gamma_mode_name(m: GammaMode) -> &'static str {
    match m {
        GammaMode::FdtConsistent => "fdt",
        GammaMode::Literal => "literal",
    }
}

fn parse_sigma_variant(s: &str) -> Option<SigmaThermalVariant> {
    match s {
        "leading" => Some(SigmaThermalVariant::Leading),
        "full" => Some(SigmaThermalVariant::Full),
        _ => None,
    }
}

pub fn sigma_variant_name(v: SigmaThermalVariant) -> &'static str {
    match v {
        SigmaThermalVariant::Leading => "leading",
        SigmaThermalVariant::Full => "full",
    }
}

fn parse_thermal_noise(s: &str) -> Option<ThermalNoise> {
    match s {
        "white" => Some(ThermalNoise::White),
        "ou" => Some(ThermalNoise::Ou),
        _ => None,
    }
}

pub fn thermal_noise_name(n: ThermalNoise) -> &'static str {
    match n {
        ThermalNoise::White => "white",
        ThermalNoise::Ou => "ou",
    }
}

struct Parser<'a> {
    entries: &'a BTreeMap<String, Entry>,
}

impl Parser<'_> {
    fn invalid(&self, key: &str, reason: impl Into<String>) -> ConfigError {
        let line = self.entries.get(key).map_or(0, |e| e.line);
        err(
            line,
            ConfigErrorKind::InvalidValue {
                key: key.to_string(),
                reason: reason.into(),
            },
        )
    }

    fn finite(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        let Some(e) = self.entries.get(key) else {
            return Ok(None);
        };
        match e.value.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Some(v)),
            _ => Err(self.invalid(key, format!("`{}` is not a finite number", e.value))),
        }
    }

    fn non_negative(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.finite(key)? {
            Some(v) if v < 0.0 => Err(self.invalid(key, format!("must be non-negative, got {v}"))),
            v => Ok(v),
        }
    }

    fn positive(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.finite(key)? {
            Some(v) if v <= 0.0 => Err(self.invalid(key, format!("must be positive, got {v}"))),
            v => Ok(v),
        }
    }

    fn count(&self, key: &str, min: usize) -> Result<Option<usize>, ConfigError> {
        let Some(e) = self.entries.get(key) else {
            return Ok(None);
        };
        match e.value.parse::<usize>() {
            Ok(v) if v >= min => Ok(Some(v)),
            _ => Err(self.invalid(
                key,
                format!("expected an integer >= {min}, got `{}`", e.value),
            )),
        }
    }

    fn seed(&self) -> Result<Option<u64>, ConfigError> {
        let Some(e) = self.entries.get("seed") else {
            return Ok(None);
        };
        e.value.parse::<u64>().map(Some).map_err(|_| {
            self.invalid(
                "seed",
                format!("expected a 64-bit unsigned integer, got `{}`", e.value),
            )
        })
    }

    fn choice<T>(
        &self,
        key: &str,
        parse: impl Fn(&str) -> Option<T>,
    ) -> Result<Option<T>, ConfigError> {
        let Some(e) = self.entries.get(key) else {
            return Ok(None);
        };
        parse(&e.value)
            .map(Some)
            .ok_or_else(|| self.invalid(key, format!("unrecognized value `{}`", e.value)))
    }
}
