//! Stationary Gaussian force noise on a uniform time grid.
//!
//! Three laws are supported: the vacuum ω⁵ spectrum with a hard cutoff
//! (spectral sum evaluated by FFT), the thermal exponential kernel (exact
//! Ornstein–Uhlenbeck recursion) and its white-noise limit.
//!
//! Every path is driven by its own ChaCha8 stream, so a path depends only on
//! `(spec, grid, seed)` and ensembles are reproducible under any scheduling.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, ExecPolicy};
use crate::grid::TimeGrid;
use crate::kernels::{self, Domain, KernelKind, SampledKernel};
use crate::params::ReducedParams;

/// Default frequency-lattice oversampling relative to the time grid.
pub const DEFAULT_OVERSAMPLE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NoiseSpec {
    /// One-sided spectrum S(ω) = (area/720π²) ω⁵ on 0 ≤ ω ≤ cutoff.
    VacuumColored { area: f64, cutoff: f64 },
    /// Autocovariance `variance · e^{−|τ|/corr_time}`.
    ThermalOU { corr_time: f64, variance: f64 },
    /// δ-correlated noise ⟨η(t)η(t′)⟩ = strength · δ(t − t′).
    White { strength: f64 },
}

impl NoiseSpec {
    pub fn vacuum(params: &ReducedParams) -> Self {
        NoiseSpec::VacuumColored {
            area: params.area(),
            cutoff: params.lambda,
        }
    }

    /// Exponential thermal kernel: corr_time = τ_B/4, variance 16l²/(π²τ_B⁶).
    pub fn thermal_ou(params: &ReducedParams) -> Result<Self> {
        let p = params.sim_physical();
        Ok(NoiseSpec::ThermalOU {
            corr_time: p.tau_b()? / 4.0,
            variance: kernels::sigma_thermal_time(0.0, &p)?,
        })
    }

    /// White-noise limit with D = 8π²AT⁵.
    pub fn white(params: &ReducedParams) -> Result<Self> {
        Ok(NoiseSpec::White {
            strength: kernels::sigma_thermal_white_strength(&params.sim_physical())?,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            NoiseSpec::VacuumColored { area, cutoff } => {
                area.is_finite() && area >= 0.0 && cutoff.is_finite() && cutoff > 0.0
            }
            NoiseSpec::ThermalOU {
                corr_time,
                variance,
            } => {
                corr_time.is_finite() && corr_time > 0.0 && variance.is_finite() && variance >= 0.0
            }
            NoiseSpec::White { strength } => strength.is_finite() && strength >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("invalid noise spec {self:?}")))
        }
    }

    /// Continuum autocovariance at lag `tau`. For white noise this is the
    /// discrete-grid value `D/Δt` at zero lag and 0 elsewhere.
    pub fn autocovariance(&self, tau: f64, dt: f64) -> f64 {
        match *self {
            NoiseSpec::VacuumColored { area, cutoff } => {
                area / (720.0 * PI * PI) / PI * kernels::cos_moment5(cutoff, tau)
            }
            NoiseSpec::ThermalOU {
                corr_time,
                variance,
            } => variance * (-tau.abs() / corr_time).exp(),
            NoiseSpec::White { strength } => {
                if tau.abs() < 0.5 * dt {
                    strength / dt
                } else {
                    0.0
                }
            }
        }
    }

    /// One-sided spectrum in the convention C(τ) = (1/π)∫₀^∞ S(ω) cos ωτ dω.
    pub fn spectrum(&self, omega: f64) -> f64 {
        let w = omega.abs();
        match *self {
            NoiseSpec::VacuumColored { area, cutoff } => {
                if w <= cutoff {
                    area / (720.0 * PI * PI) * w.powi(5)
                } else {
                    0.0
                }
            }
            NoiseSpec::ThermalOU {
                corr_time,
                variance,
            } => 2.0 * variance * corr_time / (1.0 + (w * corr_time).powi(2)),
            NoiseSpec::White { strength } => strength,
        }
    }

    /// Time over which correlations decay; used to pick estimator lags.
    pub fn correlation_time(&self, dt: f64) -> f64 {
        match *self {
            NoiseSpec::VacuumColored { cutoff, .. } => 1.0 / cutoff,
            NoiseSpec::ThermalOU { corr_time, .. } => corr_time,
            NoiseSpec::White { .. } => dt,
        }
    }
}

/// A realized noise sample path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisePath {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
    pub seed: u64,
    pub spec: NoiseSpec,
}

impl NoisePath {
    /// An identically zero forcing on `grid`.
    pub fn zeros(grid: TimeGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
            seed: 0,
            spec: NoiseSpec::White { strength: 0.0 },
        }
    }

    /// Whether the path is piecewise constant over steps (white noise) rather
    /// than a sampled continuous process.
    pub fn is_white(&self) -> bool {
        matches!(self.spec, NoiseSpec::White { .. })
    }
}

/// Seed of path `index` in an ensemble with master seed `master`.
pub fn path_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ index.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Draws one path; a convenience wrapper over [`NoiseGenerator`].
pub fn synthesize(spec: NoiseSpec, grid: TimeGrid, seed: u64) -> Result<NoisePath> {
    NoiseGenerator::new(spec, grid)?.sample(seed)
}

/// Reusable synthesizer for many paths on one grid. Holds the FFT plan and
/// spectral weights for the vacuum law.
#[derive(Clone)]
pub struct NoiseGenerator {
    spec: NoiseSpec,
    grid: TimeGrid,
    lattice: Option<SpectralLattice>,
}

#[derive(Clone)]
struct SpectralLattice {
    d_omega: f64,
    /// Amplitudes √(W_k/π) for k = 1..=K.
    amps: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    size: usize,
}

impl std::fmt::Debug for NoiseGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NoiseGenerator")
            .field("spec", &self.spec)
            .field("grid", &self.grid)
            .field("fft_size", &self.lattice.as_ref().map(|l| l.size))
            .finish()
    }
}

impl NoiseGenerator {
    pub fn new(spec: NoiseSpec, grid: TimeGrid) -> Result<Self> {
        Self::with_oversample(spec, grid, DEFAULT_OVERSAMPLE)
    }

    pub fn with_oversample(spec: NoiseSpec, grid: TimeGrid, oversample: usize) -> Result<Self> {
        spec.validate()?;
        if grid.len() < 2 {
            return Err(Error::EmptyGrid);
        }
        let lattice = match spec {
            NoiseSpec::VacuumColored { area, cutoff } => {
                Some(SpectralLattice::new(area, cutoff, grid, oversample.max(1))?)
            }
            _ => None,
        };
        Ok(Self {
            spec,
            grid,
            lattice,
        })
    }

    pub fn spec(&self) -> NoiseSpec {
        self.spec
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    /// Spacing of the frequency lattice (vacuum law only).
    pub fn frequency_spacing(&self) -> Option<f64> {
        self.lattice.as_ref().map(|l| l.d_omega)
    }

    /// Exact autocovariance of the synthesized discrete process at lag
    /// `tau`. Differs from the continuum kernel only for the vacuum law,
    /// where the spectrum is represented on a finite lattice.
    pub fn realized_autocovariance(&self, tau: f64) -> f64 {
        match &self.lattice {
            Some(l) => l
                .amps
                .iter()
                .enumerate()
                .map(|(i, a)| a * a * ((i + 1) as f64 * l.d_omega * tau).cos())
                .sum(),
            None => self.spec.autocovariance(tau, self.grid.dt()),
        }
    }

    pub fn sample(&self, seed: u64) -> Result<NoisePath> {
        let n = self.grid.len();
        let dt = self.grid.dt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = match self.spec {
            NoiseSpec::White { strength } => {
                let sd = (strength / dt).sqrt();
                (0..n).map(|_| sd * normal(&mut rng)).collect()
            }
            NoiseSpec::ThermalOU {
                corr_time,
                variance,
            } => {
                let rho = (-dt / corr_time).exp();
                let innov = (variance * -(-2.0 * dt / corr_time).exp_m1()).sqrt();
                let mut x = variance.sqrt() * normal(&mut rng);
                let mut out = Vec::with_capacity(n);
                out.push(x);
                for _ in 1..n {
                    x = x * rho + innov * normal(&mut rng);
                    out.push(x);
                }
                out
            }
            NoiseSpec::VacuumColored { .. } => {
                let lattice = self.lattice.as_ref().expect("vacuum lattice");
                lattice.sample(&mut rng, self.grid)
            }
        };
        if values.iter().any(|v: &f64| !v.is_finite()) {
            return Err(Error::InvalidParams("noise path is not finite".into()));
        }
        Ok(NoisePath {
            grid: self.grid,
            values,
            seed,
            spec: self.spec,
        })
    }
}

impl SpectralLattice {
    fn new(area: f64, cutoff: f64, grid: TimeGrid, oversample: usize) -> Result<Self> {
        let dt = grid.dt();
        let nyquist = PI / dt;
        if nyquist < cutoff {
            return Err(Error::NyquistViolation { nyquist, cutoff });
        }
        // Pick the FFT size so that the cutoff falls near the middle of a
        // lattice cell, which keeps the clipped top cell well balanced.
        let m_min = oversample * grid.len();
        let span = (2.0 * PI / (cutoff * dt)).ceil() as usize + 1;
        let mut size = m_min;
        let mut best = f64::INFINITY;
        for m in m_min..=m_min + span {
            let ratio = cutoff * m as f64 * dt / (2.0 * PI);
            let miss = (ratio.fract() - 0.5).abs();
            if miss < best - 1e-12 {
                best = miss;
                size = m;
            }
        }
        let d_omega = 2.0 * PI / (size as f64 * dt);
        let coeff = area / (720.0 * PI * PI);
        let prim = |w: f64| coeff * w.powi(6) / 6.0;
        let mut amps = Vec::new();
        let mut k = 1usize;
        loop {
            let lo = if k == 1 {
                0.0
            } else {
                (k as f64 - 0.5) * d_omega
            };
            if lo >= cutoff {
                break;
            }
            let hi = ((k as f64 + 0.5) * d_omega).min(cutoff);
            let weight = prim(hi) - prim(lo);
            amps.push((weight / PI).sqrt());
            k += 1;
        }
        let fft = FftPlanner::new().plan_fft_inverse(size);
        Ok(Self {
            d_omega,
            amps,
            fft,
            size,
        })
    }

    fn sample(&self, rng: &mut ChaCha8Rng, grid: TimeGrid) -> Vec<f64> {
        // η_j = Re Σ_k c_k e^{i 2π k j / M},  c_k = A_k (a_k − i b_k) e^{i ω_k t0}
        let mut buf = vec![Complex64::new(0.0, 0.0); self.size];
        let t0 = grid.t0();
        for (i, amp) in self.amps.iter().enumerate() {
            let k = i + 1;
            let a = normal(rng);
            let b = normal(rng);
            let mut c = Complex64::new(amp * a, -amp * b);
            if t0 != 0.0 {
                c *= Complex64::from_polar(1.0, k as f64 * self.d_omega * t0);
            }
            buf[k % self.size] += c;
        }
        self.fft.process(&mut buf);
        buf.iter().take(grid.len()).map(|z| z.re).collect()
    }
}

/// Autocovariance estimate with per-lag standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct AutocovEstimate {
    /// Lags in time units, values real.
    pub kernel: SampledKernel,
    pub se: Vec<f64>,
    pub n_paths: usize,
}

impl AutocovEstimate {
    pub fn lags(&self) -> &[f64] {
        self.kernel.grid()
    }

    pub fn value(&self, lag: usize) -> f64 {
        self.kernel.values()[lag].re
    }
}

/// Streaming autocovariance estimator.
///
/// Each path contributes the lag products averaged over its own samples
/// (the process mean is known to be zero); the estimate is the mean of these
/// per-path values and the standard error is their spread over √P. Paths are
/// folded in push order, so the result is a fixed function of that order.
#[derive(Debug, Clone)]
pub struct AutocovAccumulator {
    grid: TimeGrid,
    max_lag: usize,
    n: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl AutocovAccumulator {
    pub fn new(grid: TimeGrid, max_lag: usize) -> Result<Self> {
        if max_lag >= grid.len() {
            return Err(Error::InvalidGrid(format!(
                "max_lag {max_lag} must be below the path length {}",
                grid.len()
            )));
        }
        Ok(Self {
            grid,
            max_lag,
            n: 0,
            mean: vec![0.0; max_lag + 1],
            m2: vec![0.0; max_lag + 1],
        })
    }

    pub fn push(&mut self, path: &NoisePath) -> Result<()> {
        if path.grid != self.grid {
            return Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                path.grid, self.grid
            )));
        }
        self.push_values(&path.values);
        Ok(())
    }

    fn push_values(&mut self, x: &[f64]) {
        let products = lag_products(x, self.max_lag);
        self.push_products(&products);
    }

    /// Folds in one path's lag products as returned by [`lag_products`].
    pub fn push_products(&mut self, products: &[f64]) {
        self.n += 1;
        let n = self.n as f64;
        for (lag, &c) in products.iter().enumerate().take(self.max_lag + 1) {
            let d = c - self.mean[lag];
            self.mean[lag] += d / n;
            self.m2[lag] += d * (c - self.mean[lag]);
        }
    }

    pub fn n_paths(&self) -> usize {
        self.n
    }

    pub fn finish(&self) -> Result<AutocovEstimate> {
        if self.n < 2 {
            return Err(Error::InvalidParams(format!(
                "need at least 2 paths, got {}",
                self.n
            )));
        }
        let p = self.n as f64;
        let se = self
            .m2
            .iter()
            .map(|m| (m / (p - 1.0)).max(0.0).sqrt() / p.sqrt())
            .collect();
        let lags = (0..=self.max_lag)
            .map(|l| l as f64 * self.grid.dt())
            .collect();
        Ok(AutocovEstimate {
            kernel: SampledKernel::from_real(Domain::Time, KernelKind::SigmaFF, lags, &self.mean)?,
            se,
            n_paths: self.n,
        })
    }
}

/// Per-path lag products (1/(N − ℓ)) Σ_j x_j x_{j+ℓ} for ℓ = 0..=max_lag.
pub fn lag_products(x: &[f64], max_lag: usize) -> Vec<f64> {
    (0..=max_lag.min(x.len().saturating_sub(1)))
        .map(|lag| {
            let count = x.len() - lag;
            pairwise_sum(&x[..count], &x[lag..]) / count as f64
        })
        .collect()
}

/// Autocovariance of `n_paths` freshly synthesized paths, without keeping
/// them in memory. Paths are generated under `policy` and folded in index
/// order.
pub fn ensemble_autocovariance(
    generator: &NoiseGenerator,
    n_paths: usize,
    master_seed: u64,
    max_lag: usize,
    policy: ExecPolicy,
) -> Result<AutocovEstimate> {
    let mut acc = AutocovAccumulator::new(generator.grid(), max_lag)?;
    let products = exec::map_indexed(n_paths, policy, |i| {
        generator
            .sample(path_seed(master_seed, i as u64))
            .map(|p| lag_products(&p.values, max_lag))
    });
    for p in products {
        acc.push_products(&p?);
    }
    acc.finish()
}

/// Batch-mean autocovariance of a set of paths on a common grid, lags
/// `0..=max_lag` in grid steps.
pub fn autocovariance_estimate(paths: &[NoisePath], max_lag: usize) -> Result<AutocovEstimate> {
    let first = paths
        .first()
        .ok_or_else(|| Error::InvalidParams("need at least 2 paths, got 0".into()))?;
    let mut acc = AutocovAccumulator::new(first.grid, max_lag)?;
    for p in paths {
        acc.push(p)?;
    }
    acc.finish()
}

/// Σ a_i b_i by pairwise summation.
fn pairwise_sum(a: &[f64], b: &[f64]) -> f64 {
    const BLOCK: usize = 128;
    if a.len() <= BLOCK {
        return a.iter().zip(b).map(|(x, y)| x * y).sum();
    }
    let mid = a.len() / 2;
    pairwise_sum(&a[..mid], &b[..mid]) + pairwise_sum(&a[mid..], &b[mid..])
}

/// Hann-tapered periodogram Δt|Σ w_j x_j e^{−iωt_j}|² / Σ w_j² of one path.
/// Its expectation is the one-sided spectrum S(ω) smoothed over a few
/// multiples of 2π/T; the taper keeps leakage from distant frequencies
/// negligible.
pub fn periodogram(path: &NoisePath, omega: f64) -> f64 {
    let g = path.grid;
    let n = path.values.len();
    let (mut re, mut im, mut norm) = (0.0, 0.0, 0.0);
    for (j, x) in path.values.iter().enumerate() {
        let w = 0.5 - 0.5 * (2.0 * PI * j as f64 / n as f64).cos();
        let (s, c) = (omega * (g.time(j) - g.t0())).sin_cos();
        re += w * x * c;
        im -= w * x * s;
        norm += w * w;
    }
    g.dt() * (re * re + im * im) / norm
}

/// Fraction of a path's power (excluding ω = 0) above `omega_c`, from a
/// Hann-windowed periodogram to limit leakage across the cutoff.
pub fn power_fraction_above(path: &NoisePath, omega_c: f64) -> f64 {
    let n = path.values.len();
    let mut buf: Vec<Complex64> = path
        .values
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            let w = 0.5 - 0.5 * (2.0 * PI * j as f64 / n as f64).cos();
            Complex64::new(w * x, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let d_omega = 2.0 * PI / (n as f64 * path.grid.dt());
    let (mut total, mut above) = (0.0, 0.0);
    for (k, z) in buf.iter().enumerate().take(n / 2 + 1).skip(1) {
        let p = z.norm_sqr();
        total += p;
        if k as f64 * d_omega > omega_c {
            above += p;
        }
    }
    if total > 0.0 {
        above / total
    } else {
        0.0
    }
}
