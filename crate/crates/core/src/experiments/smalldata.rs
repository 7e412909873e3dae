//! Small-data regime: the nonlinear correction `w - w_lin` measured in the
//! weighted `L^m` norm scales at least like `δ^{3m/4}` in the data size `δ`.
//! `w_lin` is produced by the same scheme with the nonlinearity switched
//! off, so discretization errors common to both cancel.

use serde::{Deserialize, Serialize};

use super::data::{DataSpec, GridSpec};
use super::linear_fit;
use super::report::{ExperimentOutput, ReportBuilder, Series};
use crate::energetics::{hardy_weighted_norm, weighted_lm_norm, HardyMode};
use crate::error::{Error, Result};
use crate::grid::{differentiate, RadialState, SampledFunction};
use crate::model::Params;
use crate::nonlinear::{evolve, RunStatus, SolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SmallDataConfig {
    pub grid: GridSpec,
    pub solver: SolverConfig,
    /// Unscaled data; run `k` uses `ε_k` times it.
    pub base: DataSpec,
    pub epsilons: Vec<f64>,
}

impl Default for SmallDataConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec { r_max: 12.0, n: 1200 },
            solver: SolverConfig { t_end: 4.0, record_stride: 10, ..Default::default() },
            base: DataSpec::Gaussian { amplitude: 5.0, width: 1.0, velocity: 0.0 },
            epsilons: vec![0.02, 0.04, 0.08],
        }
    }
}

fn scaled(state: &RadialState, eps: f64) -> RadialState {
    RadialState {
        params: state.params,
        w: state.w.map(|_, v| eps * v),
        wt: state.wt.map(|_, v| eps * v),
        time: state.time,
    }
}

/// `‖r^{1-2/m}∂_r w₀‖_{L^m} + ‖r^{1-2/m} w₁‖_{L^m}`.
pub fn data_size(state: &RadialState) -> Result<f64> {
    let m = state.params.m();
    Ok(hardy_weighted_norm(&state.w, HardyMode::Derivative, m)?
        + weighted_lm_norm(&state.wt, 1.0 - 2.0 / m, m))
}

/// `‖r^{1-2/m}∂_r(w_a - w_b)‖_{L^m} + ‖r^{1-2/m}∂_t(w_a - w_b)‖_{L^m}`.
pub fn weighted_difference(a: &RadialState, b: &RadialState) -> Result<f64> {
    let m = a.params.m();
    let g = *a.grid();
    let dw = SampledFunction::new(g, a.w.values().iter().zip(b.w.values()).map(|(x, y)| x - y).collect())?;
    let dwt = SampledFunction::new(g, a.wt.values().iter().zip(b.wt.values()).map(|(x, y)| x - y).collect())?;
    let wgt = 1.0 - 2.0 / m;
    Ok(weighted_lm_norm(&differentiate(&dw)?, wgt, m) + weighted_lm_norm(&dwt, wgt, m))
}

pub fn run_smalldata(params: Params, cfg: &SmallDataConfig) -> Result<ExperimentOutput> {
    let grid = cfg.grid.build()?;
    let base = cfg.base.build(params, grid)?;
    let m = params.m();
    let target = 0.75 * m - 0.25;
    let mut series = Series::new("rate", &["epsilon", "delta", "D"]);
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for &eps in &cfg.epsilons {
        let data = scaled(&base, eps);
        let delta = data_size(&data)?;
        let nl = evolve(&data, &cfg.solver)?;
        let lin = evolve(&data, &cfg.solver.linear())?;
        if let RunStatus::BlewUp { t_star } | RunStatus::Unstable { t: t_star } = nl.status {
            return Err(Error::BlowupEncountered(t_star));
        }
        let mut d = 0.0f64;
        for (a, b) in nl.states.iter().zip(&lin.states) {
            d = d.max(weighted_difference(a, b)?);
        }
        series.push(vec![eps, delta, d]);
        if delta > 0.0 && d > 0.0 {
            pts.push((delta.ln(), d.ln()));
        }
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut b = ReportBuilder::new("smalldata", Some(params), cfg);
    let slope = if pts.len() >= 2 {
        let (x, y): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
        linear_fit(&x, &y).0
    } else {
        b.note("fewer than two nonzero runs; slope undefined");
        f64::NAN
    };
    let pair: Vec<f64> = pts.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
    let min_pair = pair.iter().cloned().fold(f64::INFINITY, f64::min);
    // largest ε whose pair with the previous one still shows the rate
    let mut largest_ok = f64::NAN;
    let mut sorted_eps: Vec<f64> = cfg.epsilons.iter().copied().filter(|e| *e > 0.0).collect();
    sorted_eps.sort_by(f64::total_cmp);
    for (k, e) in pair.iter().enumerate() {
        if *e >= target {
            largest_ok = sorted_eps.get(k + 1).copied().unwrap_or(f64::NAN);
        }
    }
    b.metric("fitted_slope", slope)
        .metric("target_slope", target)
        .metric("slope_excess", slope - target)
        .metric("min_pair_exponent", min_pair)
        .metric("min_pair_exponent_excess", min_pair - target);
    if largest_ok.is_finite() {
        b.metric("largest_eps_in_rate_regime", largest_ok);
    }
    b.series(series);
    b.finish()
}
