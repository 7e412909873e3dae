//! Experiment runners: each turns one quantitative statement into a
//! report whose pass flag is a pure function of its metrics and the
//! static threshold table.

pub mod blowup;
pub mod channel;
pub mod conservation;
pub mod data;
pub mod decay;
pub mod finite_speed;
pub mod huygens;
pub mod linear;
pub mod norms;
pub mod operator_bounds;
pub mod report;
pub mod smalldata;
pub mod stationary_suite;
pub mod suite;

pub use data::{DataSpec, GridSpec};
pub use report::{evaluate, ExperimentOutput, ExperimentReport, Series, Threshold};
pub use suite::{run_experiment, SuiteConfig, EXPERIMENTS};

/// Least-squares line through `(x, y)`: `(slope, intercept)`.
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Count of steps where `vals` increases beyond a relative tolerance.
pub(crate) fn increases(vals: &[f64], rel_tol: f64) -> usize {
    vals.windows(2)
        .filter(|w| w[1] > w[0] * (1.0 + rel_tol) + f64::MIN_POSITIVE)
        .count()
}

/// Times `0, Δ, 2Δ, …, horizon` (sign carried by `horizon`).
pub(crate) fn time_grid(horizon: f64, step: f64) -> Vec<f64> {
    let k = (horizon.abs() / step).round() as usize;
    (0..=k).map(|i| horizon.signum() * i as f64 * step).collect()
}
