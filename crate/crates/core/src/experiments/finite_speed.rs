//! Grid-level finite speed of propagation: modifying data inside `B_R`
//! leaves `r >= R + t` untouched.

use serde::{Deserialize, Serialize};

use super::data::{bump, BumpRanges, DataSpec, GridSpec};
use super::report::{ExperimentOutput, ReportBuilder, Series};
use crate::error::{Error, Result};
use crate::grid::RadialState;
use crate::model::Params;
use crate::nonlinear::{check_finite_speed, SolverConfig};
use crate::operators::exterior_data;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FiniteSpeedConfig {
    pub grid: GridSpec,
    pub solver: SolverConfig,
    pub data: DataSpec,
    pub radius: f64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for FiniteSpeedConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec { r_max: 12.0, n: 1200 },
            solver: SolverConfig { t_end: 8.0, record_stride: 5, ..Default::default() },
            data: DataSpec::Bumps { seed: 42, ranges: BumpRanges { amplitude: 0.5, ..Default::default() } },
            radius: 2.0,
            trials: 5,
            seed: 42,
        }
    }
}

pub fn run_finite_speed(params: Params, cfg: &FiniteSpeedConfig) -> Result<ExperimentOutput> {
    if !(cfg.radius > 0.0) {
        return Err(Error::BadRadius(cfg.radius, cfg.grid.r_max));
    }
    let grid = cfg.grid.build()?;
    let base = cfg.data.build(params, grid)?;
    let mut rng = SplitMix64::new(cfg.seed);
    let mut series = Series::new("trials", &["trial", "max_discrepancy"]);
    let mut worst = 0.0f64;
    for trial in 0..=cfg.trials {
        let other = if trial == 0 {
            exterior_data(&base, cfg.radius)?
        } else {
            // bump strictly inside B_R
            let width = rng.uniform(0.1, 0.5) * cfg.radius;
            let center = rng.uniform(0.0, cfg.radius - width);
            let (a0, a1) = (rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
            RadialState::new(
                params,
                base.w.map(|r, v| v + a0 * bump((r - center) / width)),
                base.wt.map(|r, v| v + a1 * bump((r - center) / width)),
                0.0,
            )?
        };
        let d = check_finite_speed(&base, &other, cfg.radius, &cfg.solver)?;
        worst = worst.max(d);
        series.push(vec![trial as f64, d]);
    }
    let mut b = ReportBuilder::new("finite_speed", Some(params), cfg);
    b.metric("max_discrepancy", worst).series(series);
    b.note("trial 0 compares against the exterior data (T_R w0, 1_{r>=R} w1)");
    b.finish()
}
