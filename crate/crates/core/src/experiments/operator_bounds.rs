//! Boundedness of the truncation `T_R` on `Ḣ^{s_c}` and of the exterior
//! indicator on `Ḣ^{s_c-1}`, and continuity of `R ↦ T_R φ`.
//!
//! The operator norms are scale invariant, so the measured constant at
//! radius `R` is taken over a fixed random family dilated by `R`; the
//! spread across `R` then isolates discretization effects.

use serde::{Deserialize, Serialize};

use super::data::{random_smooth, GridSpec};
use super::report::{ExperimentOutput, ReportBuilder, Series};
use crate::energetics::sobolev_norm_radial;
use crate::error::Result;
use crate::grid::SampledFunction;
use crate::model::Params;
use crate::operators::{indicator_exterior, truncate_t};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OperatorBoundsConfig {
    pub grid: GridSpec,
    pub radii: Vec<f64>,
    pub family_size: usize,
    pub seed: u64,
    pub continuity_sigma: f64,
    pub continuity_steps: usize,
}

impl Default for OperatorBoundsConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec { r_max: 40.0, n: 4000 },
            radii: vec![0.5, 1.0, 2.0, 4.0],
            family_size: 30,
            seed: 42,
            continuity_sigma: 1.0,
            continuity_steps: 8,
        }
    }
}

fn spread(c: &[f64]) -> f64 {
    let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (hi - lo) / lo
}

pub fn run_operator_bounds(params: Params, cfg: &OperatorBoundsConfig) -> Result<ExperimentOutput> {
    let grid = cfg.grid.build()?;
    let s = params.s_c();
    let seeds: Vec<u64> = {
        let mut rng = SplitMix64::new(cfg.seed);
        (0..cfg.family_size).map(|_| rng.next_u64()).collect()
    };
    let mut series = Series::new("constants", &["R", "C_truncation", "C_indicator"]);
    let (mut ct, mut ci) = (Vec::new(), Vec::new());
    for &radius in &cfg.radii {
        let (mut best_t, mut best_i) = (0.0f64, 0.0f64);
        for &seed in &seeds {
            let phi = random_smooth(&mut SplitMix64::new(seed), grid, radius);
            let base_hi = sobolev_norm_radial(&phi, s)?;
            let base_lo = sobolev_norm_radial(&phi, s - 1.0)?;
            if base_hi > 0.0 {
                best_t = best_t.max(sobolev_norm_radial(&truncate_t(&phi, radius)?, s)? / base_hi);
            }
            if base_lo > 0.0 {
                best_i = best_i.max(sobolev_norm_radial(&indicator_exterior(&phi, radius)?, s - 1.0)? / base_lo);
            }
        }
        ct.push(best_t);
        ci.push(best_i);
        series.push(vec![radius, best_t, best_i]);
    }

    // continuity: ‖(T_{R_k} - T_σ)φ‖ with R_k = σ(1 + ½·4^{-k})
    let sigma = cfg.continuity_sigma;
    let phi = random_smooth(&mut SplitMix64::new(cfg.seed ^ 0x5EED), grid, sigma);
    let norm = sobolev_norm_radial(&phi, s)?;
    let t_sigma = truncate_t(&phi, sigma)?;
    let mut cont = Series::new("continuity", &["R", "distance_rel"]);
    let mut dists = Vec::new();
    for k in 1..=cfg.continuity_steps {
        let rk = sigma * (1.0 + 0.5 * 0.25f64.powi(k as i32));
        let tk = truncate_t(&phi, rk)?;
        let diff = SampledFunction::new(
            grid,
            tk.values().iter().zip(t_sigma.values()).map(|(a, b)| a - b).collect(),
        )?;
        let d = sobolev_norm_radial(&diff, s)? / norm;
        dists.push(d);
        cont.push(vec![rk, d]);
    }
    let strict = dists.windows(2).filter(|w| !(w[1] < w[0])).count();
    let max_of = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max);
    let mut b = ReportBuilder::new("operator_bounds", Some(params), cfg);
    b.metric("truncation_spread", spread(&ct))
        .metric("indicator_spread", spread(&ci))
        .metric("truncation_constant_max", max_of(&ct))
        .metric("indicator_constant_max", max_of(&ci))
        .metric("continuity_monotone_violations", strict as f64)
        .metric("continuity_final_rel", dists.last().copied().unwrap_or(f64::NAN))
        .series(series)
        .series(cont);
    b.finish()
}
