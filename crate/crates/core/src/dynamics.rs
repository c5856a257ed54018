//! Mirror evolution in the simulation gauge ω₀ = m = 1.
//!
//! Three routes are provided:
//!
//! * the two-stage perturbative solve, q = q_c + q_ħ, where the correction is
//!   the retarded convolution of the local radiation-reaction force with the
//!   classical motion (evaluated by quadrature);
//! * the resummed envelope obtained from the renormalization-group
//!   equations for amplitude and phase;
//! * a Langevin integrator for the order-reduced equation
//!   q̈ + γ_eff q̇ + ω_eff² q = η(t).
//!
//! The order reduction replaces q⁽⁴⁾ → q and q⁽⁵⁾ → q̇ in the local vacuum
//! force (30ε)(λ/10 q⁽⁴⁾ + q⁽⁵⁾/15), after the Λ³q̈ term has been absorbed
//! into the renormalized mass. That gives γ_eff = 2ε and ω_eff² = 1 + 3ελ,
//! so the amplitude decays at exactly ε while the frequency shifts by
//! ≈ 1.5ελ, half of the shift in the resummed phase.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::kernels::{self, GammaMode};
use crate::noise::NoisePath;
use crate::params::{ReducedParams, DEFAULT_MAX_EPSILON};
use crate::stats;

/// Coarsest step accepted by the perturbative quadrature.
pub const MAX_QUADRATURE_STEP: f64 = 2.0 * PI / 200.0;

/// Periods skipped at the start of a secular fit.
pub const FIT_SKIP_PERIODS: f64 = 2.0;

/// Minimum trajectory length for a secular fit, in periods.
pub const FIT_MIN_PERIODS: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Perturbative,
    ReducedLangevin,
    HarmonicExact,
}

/// A realized mirror path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub q: Vec<f64>,
    pub v: Vec<f64>,
    pub params: ReducedParams,
    pub seed: Option<u64>,
    pub method: Method,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.grid.times().collect()
    }

    /// Oscillator energy ½(v² + q²) at each grid point.
    pub fn energy(&self) -> Vec<f64> {
        self.q
            .iter()
            .zip(&self.v)
            .map(|(q, v)| 0.5 * (q * q + v * v))
            .collect()
    }
}

/// Resummed amplitude and phase of the decaying oscillation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RgEnvelope {
    /// Γ = ε
    pub decay_rate: f64,
    /// 3ελ, the shift in the resummed phase.
    pub freq_shift_envelope: f64,
    /// 1.5ελ, the shift implied by the order-reduced equation.
    pub freq_shift_reduced: f64,
    amp0: f64,
    theta0: f64,
}

impl RgEnvelope {
    /// amp0 · e^{−Γt}
    pub fn amplitude(&self, t: f64) -> f64 {
        self.amp0 * (-self.decay_rate * t).exp()
    }

    /// Cosine argument (1 + δ)(t − θ₀(1 − δ)) with δ the resummed shift.
    pub fn phase(&self, t: f64) -> f64 {
        let d = self.freq_shift_envelope;
        (1.0 + d) * (t - self.theta0 * (1.0 - d))
    }

    pub fn value(&self, t: f64) -> f64 {
        self.amplitude(t) * self.phase(t).cos()
    }

    /// Amplitude counterterm a(τ) = Γτ.
    pub fn a(&self, tau: f64) -> f64 {
        self.decay_rate * tau
    }

    /// Phase counterterm b(τ) = δτ.
    pub fn b(&self, tau: f64) -> f64 {
        self.freq_shift_envelope * tau
    }

    pub fn z_l(&self, tau: f64) -> f64 {
        1.0 + self.a(tau)
    }

    pub fn z_theta(&self, tau: f64) -> f64 {
        self.b(tau)
    }

    pub fn relaxation_time(&self) -> f64 {
        1.0 / self.decay_rate
    }
}

pub fn rg_envelope(params: &ReducedParams) -> Result<RgEnvelope> {
    params.validate(DEFAULT_MAX_EPSILON)?;
    let eps = params.epsilon;
    Ok(RgEnvelope {
        decay_rate: eps,
        freq_shift_envelope: 3.0 * eps * params.lambda,
        freq_shift_reduced: 1.5 * eps * params.lambda,
        amp0: params.amp0,
        theta0: params.phase0,
    })
}

/// Classical motion q_c = amp0 cos(t − θ₀) and its velocity.
fn classical(params: &ReducedParams, t: f64) -> (f64, f64) {
    let (s, c) = (t - params.phase0).sin_cos();
    (params.amp0 * c, -params.amp0 * s)
}

/// Two-stage perturbative solution q_c + q_ħ, with
/// q_ħ(t) = −30ε ∫_{t₀}^t sin(t − t′) [λ/10 q_c⁽⁴⁾ + q_c⁽⁵⁾/15](t′) dt′
/// evaluated by cumulative trapezoid sums.
pub fn mean_evolution_perturbative(params: &ReducedParams, grid: TimeGrid) -> Result<Trajectory> {
    params.validate(DEFAULT_MAX_EPSILON)?;
    if grid.dt() > MAX_QUADRATURE_STEP * (1.0 + 1e-12) {
        return Err(Error::StepTooCoarse {
            dt: grid.dt(),
            max: MAX_QUADRATURE_STEP,
        });
    }
    if params.epsilon > 0.0 && grid.duration() > 5.0 / params.epsilon {
        return Err(Error::InvalidGrid(format!(
            "span {} exceeds 5/Γ = {}",
            grid.duration(),
            5.0 / params.epsilon
        )));
    }
    let n = grid.len();
    let h = grid.dt();
    let pref = -30.0 * params.epsilon;
    // q_c⁽⁴⁾ = q_c and q_c⁽⁵⁾ = q̇_c for the free motion.
    let source = |t: f64| {
        let (q, v) = classical(params, t);
        params.lambda / 10.0 * q + v / 15.0
    };
    let mut q = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    let (mut ic, mut is) = (0.0, 0.0);
    let mut prev: Option<(f64, f64)> = None;
    for j in 0..n {
        let t = grid.time(j);
        let (st, ct) = t.sin_cos();
        let f = source(t);
        let cur = (ct * f, st * f);
        if let Some((pc, ps)) = prev {
            ic += 0.5 * h * (pc + cur.0);
            is += 0.5 * h * (ps + cur.1);
        }
        prev = Some(cur);
        let (qc, vc) = classical(params, t);
        q.push(qc + pref * (st * ic - ct * is));
        v.push(vc + pref * (ct * ic + st * is));
    }
    Ok(Trajectory {
        grid,
        q,
        v,
        params: *params,
        seed: None,
        method: Method::Perturbative,
    })
}

/// Secular growth rates of the perturbative correction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecularCoefficients {
    /// −(coefficient of (t − t₀)cos(t − θ₀)) / amp0
    pub decay_rate: f64,
    /// −(coefficient of (t − t₀)sin(t − θ₀)) / amp0
    pub freq_shift: f64,
}

/// Least-squares projection of q − q_c on {s cos u, s sin u, cos u, sin u}
/// with s = t − t₀ and u = t − θ₀.
pub fn perturbative_secular_coefficients(traj: &Trajectory) -> Result<SecularCoefficients> {
    let p = &traj.params;
    if p.amp0 <= 0.0 {
        return Err(Error::ZeroAmplitude);
    }
    let g = traj.grid;
    let scale = g.duration();
    let mut ata = [[0.0; 4]; 4];
    let mut atb = [0.0; 4];
    for j in 0..g.len() {
        let t = g.time(j);
        let s = (t - g.t0()) / scale;
        let (su, cu) = (t - p.phase0).sin_cos();
        let row = [s * cu, s * su, cu, su];
        let y = (traj.q[j] - classical(p, t).0) / p.amp0;
        for a in 0..4 {
            atb[a] += row[a] * y;
            for b in 0..4 {
                ata[a][b] += row[a] * row[b];
            }
        }
    }
    let x = stats::solve(ata, atb)
        .ok_or_else(|| Error::FitDiverged("singular secular basis".into()))?;
    Ok(SecularCoefficients {
        decay_rate: -x[0] / scale,
        freq_shift: -x[1] / scale,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LangevinMode {
    Vacuum,
    ThermalWhite,
    ThermalOU,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LangevinOptions {
    pub mode: LangevinMode,
    pub gamma_mode: GammaMode,
    /// With `false` the field only drives the mirror (q̈ + q = η), the
    /// early-time equation used for heating estimates.
    pub backreaction: bool,
    /// Duration of a sin² ramp applied to the forcing from the grid start.
    /// Switching the noise on smoothly removes the large initial transient
    /// a mirror at rest would otherwise receive from the UV part of the
    /// spectrum.
    pub switch_on: Option<f64>,
}

impl LangevinOptions {
    pub fn new(mode: LangevinMode) -> Self {
        Self {
            mode,
            gamma_mode: GammaMode::default(),
            backreaction: true,
            switch_on: None,
        }
    }

    pub fn with_switch_on(mut self, duration: f64) -> Self {
        self.switch_on = (duration > 0.0).then_some(duration);
        self
    }

    pub fn without_backreaction(mut self) -> Self {
        self.backreaction = false;
        self
    }

    pub fn with_gamma_mode(mut self, gamma_mode: GammaMode) -> Self {
        self.gamma_mode = gamma_mode;
        self
    }
}

/// Damping γ_eff and stiffness shift κ = ω_eff² − 1 of the reduced equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub gamma: f64,
    pub kappa: f64,
}

impl Coefficients {
    pub fn omega_eff(&self) -> f64 {
        (1.0 + self.kappa).sqrt()
    }

    /// Oscillation frequency of the free damped motion minus one.
    pub fn damped_shift(&self) -> f64 {
        (1.0 + self.kappa - 0.25 * self.gamma * self.gamma).sqrt() - 1.0
    }
}

pub fn coefficients(params: &ReducedParams, opts: &LangevinOptions) -> Result<Coefficients> {
    if !opts.backreaction {
        return Ok(Coefficients {
            gamma: 0.0,
            kappa: 0.0,
        });
    }
    Ok(match opts.mode {
        LangevinMode::Vacuum => Coefficients {
            gamma: 2.0 * params.epsilon,
            kappa: 3.0 * params.epsilon * params.lambda,
        },
        LangevinMode::ThermalWhite | LangevinMode::ThermalOU => Coefficients {
            gamma: kernels::gamma_thermal(&params.sim_physical(), opts.gamma_mode)?,
            kappa: 0.0,
        },
    })
}

/// Integrating-factor RK4: the free rotation at ω = 1 is exact, the
/// damping, stiffness shift and forcing are handled by classical RK4
/// stages in the rotating frame.
#[derive(Debug, Clone, Copy)]
struct Stepper {
    h: f64,
    gamma: f64,
    kappa: f64,
    full: (f64, f64),
    half: (f64, f64),
}

impl Stepper {
    fn new(h: f64, c: Coefficients) -> Self {
        let (s1, c1) = h.sin_cos();
        let (s2, c2) = (0.5 * h).sin_cos();
        Self {
            h,
            gamma: c.gamma,
            kappa: c.kappa,
            full: (c1, s1),
            half: (c2, s2),
        }
    }

    #[inline]
    fn rot((c, s): (f64, f64), (q, v): (f64, f64)) -> (f64, f64) {
        (q * c + v * s, -q * s + v * c)
    }

    #[inline]
    fn force(&self, (q, v): (f64, f64), f: f64) -> (f64, f64) {
        (0.0, -self.gamma * v - self.kappa * q + f)
    }

    /// Advances `y` by one step with forcing `f0`, `fm`, `f1` at the start,
    /// midpoint and end of the step.
    #[inline]
    fn step(&self, y: (f64, f64), f0: f64, fm: f64, f1: f64) -> (f64, f64) {
        let h = self.h;
        let add = |a: (f64, f64), k: f64, b: (f64, f64)| (a.0 + k * b.0, a.1 + k * b.1);
        let k1 = self.force(y, f0);
        let k2 = self.force(Self::rot(self.half, add(y, 0.5 * h, k1)), fm);
        let y_half = Self::rot(self.half, y);
        let k3 = self.force(add(y_half, 0.5 * h, k2), fm);
        let y_full = Self::rot(self.full, y);
        let k4 = self.force(add(y_full, h, Self::rot(self.half, k3)), f1);
        let e1 = Self::rot(self.full, k1);
        let e23 = Self::rot(self.half, (k2.0 + k3.0, k2.1 + k3.1));
        (
            y_full.0 + h / 6.0 * (e1.0 + 2.0 * e23.0 + k4.0),
            y_full.1 + h / 6.0 * (e1.1 + 2.0 * e23.1 + k4.1),
        )
    }
}

/// Smooth 0 → 1 ramp sin²(πs/2τ) over `0 ≤ s ≤ τ`.
pub fn switch_on_ramp(s: f64, duration: f64) -> f64 {
    if s >= duration {
        1.0
    } else if s <= 0.0 {
        0.0
    } else {
        (0.5 * PI * s / duration).sin().powi(2)
    }
}

/// Core time stepping shared by single trajectories and ensembles. Calls
/// `sink(j, q, v)` for every grid point.
#[allow(clippy::too_many_arguments)]
pub(crate) fn integrate_with(
    coeffs: Coefficients,
    grid: TimeGrid,
    forcing: &[f64],
    white: bool,
    ic: (f64, f64),
    amp0: f64,
    switch_on: Option<f64>,
    mut sink: impl FnMut(usize, f64, f64),
) -> Result<()> {
    let ramped: Vec<f64>;
    let forcing = match switch_on {
        Some(tau) => {
            ramped = forcing
                .iter()
                .enumerate()
                .map(|(j, f)| f * switch_on_ramp(grid.time(j) - grid.t0(), tau))
                .collect();
            &ramped[..]
        }
        None => forcing,
    };
    let stepper = Stepper::new(grid.dt(), coeffs);
    let mut y = ic;
    let base = amp0.max(ic.0.abs()).max(ic.1.abs());
    let mut drive = 0.0;
    sink(0, y.0, y.1);
    for j in 0..grid.len() - 1 {
        let (f0, f1) = if white {
            (forcing[j], forcing[j])
        } else {
            (forcing[j], forcing[j + 1])
        };
        y = stepper.step(y, f0, 0.5 * (f0 + f1), f1);
        drive += forcing[j].abs() * grid.dt();
        let limit = 10.0 * (base + drive) * (1.0 + coeffs.kappa.abs());
        if !(y.0.is_finite() && y.1.is_finite()) || y.0.abs() > limit {
            return Err(Error::BlowUp {
                t: grid.time(j + 1),
            });
        }
        sink(j + 1, y.0, y.1);
    }
    Ok(())
}

/// Integrates the order-reduced Langevin equation driven by a pre-sampled
/// noise path on `grid`.
///
/// White-noise paths are held constant over each step; sampled continuous
/// processes are interpolated linearly, so the midpoint stages see the
/// average of the two end values.
pub fn langevin_integrate(
    params: &ReducedParams,
    grid: TimeGrid,
    noise: &NoisePath,
    ic: (f64, f64),
    opts: &LangevinOptions,
) -> Result<Trajectory> {
    params.validate(DEFAULT_MAX_EPSILON)?;
    if noise.grid != grid || noise.values.len() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "noise grid {:?} differs from output grid {grid:?}",
            noise.grid
        )));
    }
    let coeffs = coefficients(params, opts)?;
    let n = grid.len();
    let mut q = vec![0.0; n];
    let mut v = vec![0.0; n];
    integrate_with(
        coeffs,
        grid,
        &noise.values,
        noise.is_white(),
        ic,
        params.amp0,
        opts.switch_on,
        |j, a, b| {
            q[j] = a;
            v[j] = b;
        },
    )?;
    Ok(Trajectory {
        grid,
        q,
        v,
        params: *params,
        seed: Some(noise.seed),
        method: Method::ReducedLangevin,
    })
}

/// Closed-form noise-free solution of the reduced equation.
pub fn harmonic_exact(
    params: &ReducedParams,
    grid: TimeGrid,
    ic: (f64, f64),
    opts: &LangevinOptions,
) -> Result<Trajectory> {
    let c = coefficients(params, opts)?;
    let (q0, v0) = ic;
    let half = 0.5 * c.gamma;
    let disc = 1.0 + c.kappa - half * half;
    let n = grid.len();
    let mut q = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for j in 0..n {
        let s = grid.time(j) - grid.t0();
        let e = (-half * s).exp();
        // q = e^{−γs/2}(q0 C + (v0 + γq0/2) S) with C, S the even/odd
        // fundamental solutions; C' and S' give the velocity.
        let (cs, sn, dcs, dsn) = if disc > 0.0 {
            let w = disc.sqrt();
            let (si, co) = (w * s).sin_cos();
            (co, si / w, -w * si, co)
        } else if disc < 0.0 {
            let w = (-disc).sqrt();
            let (sh, ch) = ((w * s).sinh(), (w * s).cosh());
            (ch, sh / w, w * sh, ch)
        } else {
            (1.0, s, 0.0, 1.0)
        };
        let b = v0 + half * q0;
        let x = q0 * cs + b * sn;
        let dx = q0 * dcs + b * dsn;
        q.push(e * x);
        v.push(e * (dx - half * x));
    }
    Ok(Trajectory {
        grid,
        q,
        v,
        params: *params,
        seed: None,
        method: Method::HarmonicExact,
    })
}

/// Result of fitting a e^{−γs} cos((1 + δ)s − φ) to a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecularFit {
    pub decay_rate: f64,
    pub freq_shift: f64,
    pub decay_se: f64,
    pub shift_se: f64,
    pub amplitude: f64,
    pub phase: f64,
    pub rms_residual: f64,
    pub n_points: usize,
}

/// Nonlinear least-squares fit of a damped cosine (Levenberg–Marquardt),
/// skipping the first two periods.
pub fn secular_fit(traj: &Trajectory) -> Result<SecularFit> {
    let g = traj.grid;
    let periods = g.duration() / (2.0 * PI);
    if periods < FIT_MIN_PERIODS {
        return Err(Error::TooShort {
            periods,
            required: FIT_MIN_PERIODS,
        });
    }
    let start = g
        .index_range(g.t0() + FIT_SKIP_PERIODS * 2.0 * PI, g.t_end())
        .start;
    let s: Vec<f64> = (start..g.len()).map(|j| g.time(j) - g.t0()).collect();
    let norm = traj.q[start..].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::FitDiverged("trajectory has no oscillation".into()));
    }
    let y: Vec<f64> = traj.q[start..].iter().map(|x| x / norm).collect();

    let omega =
        crossing_frequency(&s, &y).ok_or_else(|| Error::FitDiverged("no zero crossings".into()))?;
    let gamma = log_amplitude_slope(&s, &y);
    let (c, d) = linear_amplitudes(&s, &y, gamma, omega)
        .ok_or_else(|| Error::FitDiverged("singular amplitude system".into()))?;

    let mut p = [c, d, gamma, omega];
    let mut rss = residual_sum(&s, &y, &p);
    let mut mu = 1e-3;
    let mut converged = false;
    for _ in 0..200 {
        let (jtj, jtr) = normal_equations(&s, &y, &p);
        let mut improved = false;
        while mu < 1e16 {
            let mut a = jtj;
            for (i, row) in a.iter_mut().enumerate() {
                row[i] += mu * jtj[i][i].max(1e-300);
            }
            let Some(step) = stats::solve(a, jtr) else {
                mu *= 10.0;
                continue;
            };
            let trial = [
                p[0] + step[0],
                p[1] + step[1],
                p[2] + step[2],
                p[3] + step[3],
            ];
            let trial_rss = residual_sum(&s, &y, &trial);
            if trial_rss.is_finite() && trial_rss <= rss {
                let rel = (rss - trial_rss) / rss.max(1e-300);
                let small = step
                    .iter()
                    .zip(&trial)
                    .all(|(d, v)| d.abs() <= 1e-12 * v.abs().max(1e-9));
                p = trial;
                rss = trial_rss;
                mu = (mu / 10.0).max(1e-15);
                improved = true;
                if rel < 1e-14 || small {
                    converged = true;
                }
                break;
            }
            mu *= 10.0;
        }
        if converged || !improved {
            converged = true;
            break;
        }
    }
    if !converged || !p.iter().all(|v| v.is_finite()) || p[3] <= 0.0 {
        return Err(Error::FitDiverged(format!("parameters {p:?}")));
    }

    let n = s.len();
    let (jtj, _) = normal_equations(&s, &y, &p);
    let sigma2 = rss / (n as f64 - 4.0).max(1.0);
    let cov = stats::invert(jtj).ok_or_else(|| Error::FitDiverged("singular covariance".into()))?;
    Ok(SecularFit {
        decay_rate: p[2],
        freq_shift: p[3] - 1.0,
        decay_se: (sigma2 * cov[2][2]).max(0.0).sqrt(),
        shift_se: (sigma2 * cov[3][3]).max(0.0).sqrt(),
        amplitude: norm * p[0].hypot(p[1]),
        phase: p[1].atan2(p[0]),
        rms_residual: norm * (rss / n as f64).sqrt(),
        n_points: n,
    })
}

#[inline]
fn model(s: f64, p: &[f64; 4]) -> (f64, [f64; 4]) {
    let e = (-p[2] * s).exp();
    let (sn, cs) = (p[3] * s).sin_cos();
    let y = e * (p[0] * cs + p[1] * sn);
    (
        y,
        [e * cs, e * sn, -s * y, e * s * (-p[0] * sn + p[1] * cs)],
    )
}

fn residual_sum(s: &[f64], y: &[f64], p: &[f64; 4]) -> f64 {
    s.iter()
        .zip(y)
        .map(|(&t, &v)| (v - model(t, p).0).powi(2))
        .sum()
}

fn normal_equations(s: &[f64], y: &[f64], p: &[f64; 4]) -> ([[f64; 4]; 4], [f64; 4]) {
    let mut jtj = [[0.0; 4]; 4];
    let mut jtr = [0.0; 4];
    for (&t, &v) in s.iter().zip(y) {
        let (m, jac) = model(t, p);
        let r = v - m;
        for a in 0..4 {
            jtr[a] += jac[a] * r;
            for b in 0..4 {
                jtj[a][b] += jac[a] * jac[b];
            }
        }
    }
    (jtj, jtr)
}

fn crossing_frequency(s: &[f64], y: &[f64]) -> Option<f64> {
    let mut crossings = Vec::new();
    for j in 1..y.len() {
        if (y[j - 1] < 0.0) != (y[j] < 0.0) && y[j] != y[j - 1] {
            let frac = y[j - 1] / (y[j - 1] - y[j]);
            crossings.push(s[j - 1] + frac * (s[j] - s[j - 1]));
        }
    }
    if crossings.len() < 3 {
        return None;
    }
    let span = crossings[crossings.len() - 1] - crossings[0];
    Some(PI * (crossings.len() - 1) as f64 / span)
}

/// Decay rate from the RMS amplitude of the first and last tenth.
fn log_amplitude_slope(s: &[f64], y: &[f64]) -> f64 {
    let w = (y.len() / 10).max(1);
    let rms = |r: &[f64]| (r.iter().map(|v| v * v).sum::<f64>() / r.len() as f64).sqrt();
    let mid = |r: &[f64]| 0.5 * (r[0] + r[r.len() - 1]);
    let n = y.len();
    let (a1, a2) = (rms(&y[..w]), rms(&y[n - w..]));
    let dt = mid(&s[n - w..]) - mid(&s[..w]);
    if a1 > 0.0 && a2 > 0.0 && dt > 0.0 {
        (a1 / a2).ln() / dt
    } else {
        0.0
    }
}

fn linear_amplitudes(s: &[f64], y: &[f64], gamma: f64, omega: f64) -> Option<(f64, f64)> {
    let mut a = [[0.0; 2]; 2];
    let mut b = [0.0; 2];
    for (&t, &v) in s.iter().zip(y) {
        let e = (-gamma * t).exp();
        let (sn, cs) = (omega * t).sin_cos();
        let row = [e * cs, e * sn];
        for i in 0..2 {
            b[i] += row[i] * v;
            for k in 0..2 {
                a[i][k] += row[i] * row[k];
            }
        }
    }
    stats::solve(a, b).map(|x| (x[0], x[1]))
}
