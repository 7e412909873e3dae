use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("exponent p = {0} is not energy-supercritical (need p > 5)")]
    SubcriticalExponent(f64),
    #[error("exponent p = {0} is not finite")]
    NonFiniteExponent(f64),
    #[error("scale factor must be positive, got {0}")]
    NonpositiveScale(f64),
    #[error("grid too small: {0} nodes (need at least {1})")]
    GridTooSmall(usize, usize),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("bad interval [{a}, {b}] for domain [{lo}, {hi}]")]
    BadInterval { a: f64, b: f64, lo: f64, hi: f64 },
    #[error("profile half-width {l} is smaller than the data radius {r_max}")]
    DomainTooSmall { l: f64, r_max: f64 },
    #[error("causal window |t| + r_max = {need} exceeds profile half-width {l}")]
    CausalWindowExceeded { need: f64, l: f64 },
    #[error("radius must be nonnegative, got {0}")]
    NegativeRadius(f64),
    #[error("exterior cone R + |t| = {0} leaves the grid (r_max = {1})")]
    ConeLeftDomain(f64, f64),
    #[error("function does not decay at r_max: |r phi(r_max)| = {tail:e} vs max |r phi| = {max:e}")]
    DecayViolated { tail: f64, max: f64 },
    #[error("Sobolev order s = {0} outside [0, 3/2)")]
    SobolevOrder(f64),
    #[error("bad radius {0} for a cutoff on [0, {1}]")]
    BadRadius(f64, f64),
    #[error("dt_ratio = {0} violates the CFL condition dt_ratio <= 1")]
    CflViolation(f64),
    #[error("data support {support} plus t_end {t_end} reaches r_max = {r_max}")]
    CausalClosureViolated { support: f64, t_end: f64, r_max: f64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("ell must be nonzero")]
    ZeroEll,
    #[error("series start s0 = {s0} too large (relative defect {defect:e})")]
    SeriesRegionExceeded { s0: f64, defect: f64 },
    #[error("trajectory blew up at t = {0}")]
    BlowupEncountered(f64),
    #[error("state mismatch: {0}")]
    Mismatch(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
