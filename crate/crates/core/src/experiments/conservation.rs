//! Almost-conservation of the `L^m` energy along the free flow.

use serde::{Deserialize, Serialize};

use super::data::{DataSpec, GridSpec};
use super::report::{ExperimentOutput, ReportBuilder, Series};
use crate::dalembert::build_free_profile;
use crate::energetics::generalized_energy;
use crate::error::Result;
use crate::model::Params;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConservationConfig {
    pub grid: GridSpec,
    pub data: DataSpec,
    pub times: Vec<f64>,
}

impl Default for ConservationConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec { r_max: 16.0, n: 4096 },
            data: DataSpec::Gaussian { amplitude: 1.0, width: 1.0, velocity: 0.0 },
            times: (0..=10).map(f64::from).collect(),
        }
    }
}

/// Grid `E_m(t)/E_m(0)` against the bracket `[2^{1-m}, 2^{m-1}]` (10% slack)
/// and the drift of the full-line profile mass `∫|ḟ|^m`.
pub fn run_conservation(params: Params, cfg: &ConservationConfig) -> Result<ExperimentOutput> {
    let grid = cfg.grid.build()?;
    let m = params.m();
    let data = cfg.data.build(params, grid)?;
    let t_max = cfg.times.iter().fold(0.0f64, |a, t| a.max(t.abs()));
    let profile = build_free_profile(&data, grid.r_max() + t_max)?;

    let e0 = generalized_energy(&profile.eval_linear(0.0, &grid)?)?;
    let s0 = profile.full_line_surrogate(m, 0.0);
    let mut series = Series::new("energy", &["t", "E_m", "ratio", "surrogate"]);
    let (mut rmin, mut rmax, mut drift) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for &t in &cfg.times {
        let e = generalized_energy(&profile.eval_linear(t, &grid)?)?;
        let s = profile.full_line_surrogate(m, t);
        let ratio = if e0 == 0.0 { 1.0 } else { e / e0 };
        if s0 > 0.0 {
            drift = drift.max((s - s0).abs() / s0);
        }
        rmin = rmin.min(ratio);
        rmax = rmax.max(ratio);
        series.push(vec![t, e, ratio, s]);
    }
    if cfg.times.is_empty() {
        rmin = 1.0;
        rmax = 1.0;
    }
    let lower = 2f64.powf(1.0 - m) / 1.1;
    let upper = 1.1 * 2f64.powf(m - 1.0);
    let mut b = ReportBuilder::new("conservation", Some(params), cfg);
    b.metric("ratio_min", rmin)
        .metric("ratio_max", rmax)
        .metric("ratio_min_margin", rmin / lower)
        .metric("ratio_max_margin", rmax / upper)
        .metric("surrogate_drift", drift)
        .metric("E_m0", e0);
    if e0 == 0.0 {
        b.note("zero data: ratios defined as 1");
    }
    b.series(series);
    b.finish()
}
