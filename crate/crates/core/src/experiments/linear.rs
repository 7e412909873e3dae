//! Exactness of the unit-ratio leapfrog for free waves with
//! piecewise-linear profiles.

use serde::{Deserialize, Serialize};

use super::data::{random_linear_profile, GridSpec};
use super::report::{ExperimentOutput, ReportBuilder, Series};
use crate::error::Result;
use crate::model::Params;
use crate::nonlinear::{evolve_observed, SolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinearExactnessConfig {
    pub grid: GridSpec,
    pub t_end: f64,
    pub profile_support: f64,
    pub seed: u64,
    /// Snapshot stride for the `w` comparison (the reduced field is
    /// compared at every step).
    pub record_stride: usize,
}

impl Default for LinearExactnessConfig {
    fn default() -> Self {
        Self { grid: GridSpec { r_max: 16.0, n: 4096 }, t_end: 10.0, profile_support: 3.0, seed: 42, record_stride: 256 }
    }
}

pub fn run_linear_exactness(params: Params, cfg: &LinearExactnessConfig) -> Result<ExperimentOutput> {
    let grid = cfg.grid.build()?;
    let half_width = 2.0 * (grid.r_max() + cfg.t_end);
    let profile = random_linear_profile(params, grid.h(), half_width, cfg.profile_support, cfg.seed)?;
    let data = profile.eval_linear(0.0, &grid)?;
    let solver = SolverConfig { dt_ratio: 1.0, t_end: cfg.t_end, record_stride: cfg.record_stride, ..Default::default() }.linear();
    let mut worst_v = 0.0f64;
    let mut series = Series::new("error", &["t", "max_abs_error_v"]);
    let traj = evolve_observed(&data, &solver, |view| {
        let mut e = 0.0f64;
        for (i, r) in grid.nodes().enumerate() {
            let exact = profile.f_at(view.time + r) - profile.f_at(view.time - r);
            e = e.max((view.v[i] - exact).abs());
        }
        worst_v = worst_v.max(e);
        if view.step % cfg.record_stride == 0 {
            series.push(vec![view.time, e]);
        }
    })?;
    let mut worst_w = 0.0f64;
    for st in &traj.states {
        let exact = profile.eval_linear(st.time, &grid)?;
        for (a, b) in st.w.values().iter().zip(exact.w.values()) {
            worst_w = worst_w.max((a - b).abs());
        }
    }
    let mut b = ReportBuilder::new("linear_exactness", Some(params), cfg);
    b.metric("max_abs_error", worst_v.max(worst_w))
        .metric("max_abs_error_v", worst_v)
        .metric("max_abs_error_w", worst_w)
        .series(series);
    b.finish()
}
