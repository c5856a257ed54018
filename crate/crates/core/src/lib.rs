//! Semiclassical Langevin dynamics of a perfectly reflecting mirror coupled
//! to a massless scalar field.
//!
//! The crate is organised bottom-up:
//!
//! * [`params`]: physical constants, natural units and the dimensionless
//!   simulation gauge ω₀ = m = 1.
//! * [`kernels`]: closed-form dissipation (χ) and fluctuation (σ) kernels.
//! * [`fdt`]: fluctuation–dissipation checks on sampled kernels.
//! * [`noise`]: stationary Gaussian noise synthesis.
//! * [`dynamics`]: perturbative, resummed and Langevin evolution.
//! * [`observables`]: Monte-Carlo ensembles and headline estimates.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod exec;
pub mod fdt;
pub mod grid;
pub mod kernels;
pub mod noise;
pub mod observables;
pub mod params;
mod stats;

pub use error::{Error, Result};
pub use exec::ExecPolicy;
pub use grid::TimeGrid;
pub use kernels::{GammaMode, SampledKernel, SigmaThermalVariant};
pub use noise::{NoisePath, NoiseSpec};
pub use params::{PhysicalParams, ReducedParams, SiConversion};
