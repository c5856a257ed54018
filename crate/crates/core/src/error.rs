use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("perturbativity violated: epsilon = {epsilon} >= {limit}")]
    PerturbativityViolation { epsilon: f64, limit: f64 },
    #[error("renormalized mass is not positive: {0}")]
    NegativeRenormalizedMass(f64),
    #[error("temperature must be positive")]
    ZeroTemperature,
    #[error("separation must be positive")]
    ZeroSeparation,
    #[error("evaluation point lies on the light cone")]
    PoleOnLightcone,
    #[error("frequency {omega} exceeds the cutoff {cutoff}")]
    BeyondCutoff { omega: f64, cutoff: f64 },
    #[error("kernel domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid is empty or too short")]
    EmptyGrid,
    #[error("Nyquist frequency {nyquist} is below the cutoff {cutoff}")]
    NyquistViolation { nyquist: f64, cutoff: f64 },
    #[error("time step {dt} is coarser than the allowed {max}")]
    StepTooCoarse { dt: f64, max: f64 },
    #[error("trajectory blew up at t = {t}")]
    BlowUp { t: f64 },
    #[error("fit did not converge: {0}")]
    FitDiverged(String),
    #[error("trajectory too short: {periods:.1} periods, need {required}")]
    TooShort { periods: f64, required: f64 },
    #[error("fit window too short: {0}")]
    WindowTooShort(String),
    #[error("ensemble is not stationary over the window: {0}")]
    NotStationary(String),
    #[error("oscillation amplitude must be positive")]
    ZeroAmplitude,
    #[error("kernel is distributional and has no sampled representation in this domain")]
    Distributional,
}

pub type Result<T> = std::result::Result<T, Error>;
