//! Exterior channel dichotomy: the half-mass lower bound on the certified
//! time side, checked on the exact profile surrogate and on the grid energy.

use serde::{Deserialize, Serialize};

use super::data::{bumps_state, BumpRanges, GridSpec};
use super::report::{ExperimentOutput, ReportBuilder, Series};
use super::time_grid;
use crate::dalembert::{build_free_profile, FreeWaveProfile};
use crate::energetics::exterior_generalized_energy;
use crate::error::Result;
use crate::grid::RadialGrid;
use crate::model::Params;
use crate::rng::SplitMix64;

/// Slack on the grid-level bound `E_{m,R}(t) >= ½·2^{2-m} E_{m,R}(0)`.
pub const GRID_SLACK: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChannelConfig {
    pub grid: GridSpec,
    pub radius: f64,
    pub horizon: f64,
    pub time_step: f64,
    pub trials: usize,
    pub seed: u64,
    pub ranges: BumpRanges,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec { r_max: 16.0, n: 2048 },
            radius: 0.5,
            horizon: 10.0,
            time_step: 0.25,
            trials: 100,
            seed: 42,
            ranges: BumpRanges::default(),
        }
    }
}

/// Outcome for one profile on one time side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideCheck {
    /// `min_t Ẽ(t)/Ẽ(0)` (must stay `>= ½`).
    pub surrogate_margin: f64,
    /// `min_t E_{m,R}(t) / (2^{1-m} E_{m,R}(0))` (must stay `>= 1 - 2·slack`).
    pub grid_margin: f64,
    pub surrogate_ok: bool,
    pub grid_ok: bool,
}

pub fn check_side(
    profile: &FreeWaveProfile,
    grid: &RadialGrid,
    radius: f64,
    horizon: f64,
    step: f64,
) -> Result<SideCheck> {
    let m = profile.params().m();
    let s0 = profile.exterior_surrogate(m, radius, 0.0)?;
    let e0 = exterior_generalized_energy(&profile.eval_linear(0.0, grid)?, radius)?;
    let grid_bound = 2f64.powf(1.0 - m) * e0;
    let mut out = SideCheck { surrogate_margin: 1.0, grid_margin: f64::INFINITY, surrogate_ok: true, grid_ok: true };
    for t in time_grid(horizon, step) {
        let s = profile.exterior_surrogate(m, radius, t)?;
        if s0 > 0.0 {
            let ratio = s / s0;
            out.surrogate_margin = out.surrogate_margin.min(ratio);
            if ratio < 0.5 * (1.0 - 1e-12) {
                out.surrogate_ok = false;
            }
        }
        let e = exterior_generalized_energy(&profile.eval_linear(t, grid)?, radius)?;
        if grid_bound > 0.0 {
            let ratio = e / grid_bound;
            out.grid_margin = out.grid_margin.min(ratio);
            if ratio < 1.0 - 2.0 * GRID_SLACK {
                out.grid_ok = false;
            }
        }
    }
    if !out.grid_margin.is_finite() {
        out.grid_margin = 1.0;
    }
    Ok(out)
}

pub fn run_channel(params: Params, cfg: &ChannelConfig) -> Result<ExperimentOutput> {
    let grid = cfg.grid.build()?;
    let m = params.m();
    let mut rng = SplitMix64::new(cfg.seed);
    let mut series = Series::new(
        "trials",
        &["trial", "m_minus", "m_plus", "direction", "surrogate_margin", "grid_margin"],
    );
    let (mut surrogate_failures, mut grid_failures) = (0usize, 0usize);
    let (mut worst_s, mut worst_g) = (f64::INFINITY, f64::INFINITY);
    let mut both = 0usize;
    for trial in 0..cfg.trials {
        let terms = cfg.ranges.draw(&mut rng.fork());
        let data = bumps_state(params, grid, &terms);
        let profile = build_free_profile(&data, grid.r_max() + cfg.horizon)?;
        let (minus, plus) = profile.split_masses(m, cfg.radius)?;
        let (fwd, bwd) = profile.certified_directions(m, cfg.radius)?;
        if fwd && bwd {
            both += 1;
        }
        let mut sides = Vec::new();
        if fwd {
            sides.push(check_side(&profile, &grid, cfg.radius, cfg.horizon, cfg.time_step)?);
        }
        if bwd {
            sides.push(check_side(&profile, &grid, cfg.radius, -cfg.horizon, cfg.time_step)?);
        }
        let sm = sides.iter().map(|s| s.surrogate_margin).fold(f64::INFINITY, f64::min);
        let gm = sides.iter().map(|s| s.grid_margin).fold(f64::INFINITY, f64::min);
        surrogate_failures += sides.iter().filter(|s| !s.surrogate_ok).count();
        grid_failures += sides.iter().filter(|s| !s.grid_ok).count();
        worst_s = worst_s.min(sm);
        worst_g = worst_g.min(gm);
        let direction = match (fwd, bwd) {
            (true, true) => 0.0,
            (true, false) => 1.0,
            _ => -1.0,
        };
        series.push(vec![trial as f64, minus, plus, direction, sm, gm]);
    }
    let mut b = ReportBuilder::new("channel", Some(params), cfg);
    b.metric("failures", (surrogate_failures + grid_failures) as f64)
        .metric("surrogate_failures", surrogate_failures as f64)
        .metric("grid_failures", grid_failures as f64)
        .metric("worst_margin", if cfg.trials == 0 { 1.0 } else { worst_s })
        .metric("worst_grid_margin", if cfg.trials == 0 { 1.0 } else { worst_g })
        .metric("both_directions", both as f64)
        .metric("trials", cfg.trials as f64)
        .series(series);
    b.finish()
}
