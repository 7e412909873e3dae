//! Hardy-type inequalities and the `U`-to-`V` equivalence over a random
//! family of smooth radial functions.

use serde::{Deserialize, Serialize};

use super::data::{random_smooth, GridSpec};
use super::report::{ExperimentOutput, ReportBuilder, Series};
use crate::energetics::{
    hardy_weighted_norm, lebesgue_norm, sobolev_norm_radial, utov_sides, weighted_lm_norm, HardyMode,
};
use crate::error::Result;
use crate::grid::SampledFunction;
use crate::model::Params;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NormsConfig {
    pub grid: GridSpec,
    pub count: usize,
    pub seed: u64,
    pub utov_radii: Vec<f64>,
}

impl Default for NormsConfig {
    fn default() -> Self {
        Self { grid: GridSpec { r_max: 16.0, n: 32000 }, count: 50, seed: 42, utov_radii: vec![0.0, 0.5, 1.0, 2.0] }
    }
}

/// Constants measured on one function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormTable {
    /// `‖r^{1-2/m}φ‖_{L^m} / ‖φ‖_{Ḣ^{s_c-1}}`.
    pub hardy_origin: f64,
    /// `‖r^{1-2/m}∂_rφ‖_{L^m} / ‖φ‖_{Ḣ^{s_c}}`.
    pub hardy_derivative: f64,
    /// `(‖r^{-2/m}φ‖_{L^m} + ‖φ‖_{L^{3m}}) / ‖r^{1-2/m}∂_rφ‖_{L^m}`.
    pub hardy_infinity: f64,
    /// `‖r^{-2/m}φ‖_{L^m} / (m ‖r^{1-2/m}∂_rφ‖_{L^m})`, at most 1 by the
    /// integration-by-parts argument.
    pub explicit_ratio: f64,
}

pub fn norm_table(phi: &SampledFunction, params: &Params) -> Result<NormTable> {
    let m = params.m();
    let s = params.s_c();
    let a = 1.0 - 2.0 / m;
    let der = hardy_weighted_norm(phi, HardyMode::Derivative, m)?;
    let pos_inf = weighted_lm_norm(phi, -2.0 / m, m);
    Ok(NormTable {
        hardy_origin: weighted_lm_norm(phi, a, m) / sobolev_norm_radial(phi, s - 1.0)?,
        hardy_derivative: der / sobolev_norm_radial(phi, s)?,
        hardy_infinity: (pos_inf + lebesgue_norm(phi, 3.0 * m)) / der,
        explicit_ratio: pos_inf / (m * der),
    })
}

pub fn run_norms(params: Params, cfg: &NormsConfig) -> Result<ExperimentOutput> {
    let grid = cfg.grid.build()?;
    let m = params.m();
    let mut rng = SplitMix64::new(cfg.seed);
    let mut series = Series::new(
        "constants",
        &["index", "hardy_origin", "hardy_derivative", "hardy_infinity", "explicit_ratio", "utov_ratio_min", "utov_ratio_max", "utov2_rel_defect"],
    );
    let mut worst = NormTable { hardy_origin: 0.0, hardy_derivative: 0.0, hardy_infinity: 0.0, explicit_ratio: 0.0 };
    let (mut umin, mut umax, mut u2) = (f64::INFINITY, 0.0f64, 0.0f64);
    for k in 0..cfg.count {
        let phi = random_smooth(&mut rng.fork(), grid, 1.0);
        let t = norm_table(&phi, &params)?;
        worst.hardy_origin = worst.hardy_origin.max(t.hardy_origin);
        worst.hardy_derivative = worst.hardy_derivative.max(t.hardy_derivative);
        worst.hardy_infinity = worst.hardy_infinity.max(t.hardy_infinity);
        worst.explicit_ratio = worst.explicit_ratio.max(t.explicit_ratio);
        let (mut lo, mut hi, mut d2) = (f64::INFINITY, 0.0f64, 0.0f64);
        for &radius in &cfg.utov_radii {
            let (l, r) = utov_sides(&phi, radius, m)?;
            lo = lo.min(l / r);
            hi = hi.max(l / r);
            let (l2, r2) = utov_sides(&phi, radius, 2.0)?;
            d2 = d2.max((l2 - r2).abs() / r2);
        }
        umin = umin.min(lo);
        umax = umax.max(hi);
        u2 = u2.max(d2);
        series.push(vec![k as f64, t.hardy_origin, t.hardy_derivative, t.hardy_infinity, t.explicit_ratio, lo, hi, d2]);
    }
    let mut b = ReportBuilder::new("norms", Some(params), cfg);
    b.metric("hardy_origin_constant", worst.hardy_origin)
        .metric("hardy_derivative_constant", worst.hardy_derivative)
        .metric("hardy_infinity_constant", worst.hardy_infinity)
        .metric("hardy_position_explicit_ratio", worst.explicit_ratio)
        .metric("utov_ratio_min", if cfg.count == 0 { 1.0 } else { umin })
        .metric("utov_ratio_max", if cfg.count == 0 { 1.0 } else { umax })
        .metric("utov2_max_rel_defect", u2)
        .series(series);
    b.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Sign;

    #[test]
    fn few_functions_pass() {
        let params = Params::new(7.0, Sign::Focusing).unwrap();
        let cfg = NormsConfig { count: 4, ..Default::default() };
        let out = run_norms(params, &cfg).unwrap();
        assert!(out.report.pass, "{:?}", out.report.metrics);
    }
}
