//! Strong Huygens localization of free radial waves.
//!
//! By scale invariance of the weighted mass, the sequence `(λ_n, t_n)` only
//! enters through `τ = t_n/λ_n`; the window `||x| - t_n| <= Rλ_n` becomes
//! `|r - τ| <= R` for the unscaled wave at time `τ`.

use serde::{Deserialize, Serialize};

use super::data::{DataSpec, GridSpec};
use super::increases;
use super::report::{ExperimentOutput, ReportBuilder, Series};
use crate::dalembert::build_free_profile;
use crate::energetics::SPHERE_AREA;
use crate::error::{Error, Result};
use crate::grid::{differentiate, trapezoid_window, RadialState};
use crate::model::Params;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HuygensConfig {
    pub grid: GridSpec,
    pub data: DataSpec,
    pub lambdas: Vec<f64>,
    pub times: Vec<f64>,
    pub radii: Vec<f64>,
    /// `τ` used for the bounded-ratio regime (mass off the annulus
    /// `1/R <= r <= R`).
    pub finite_tau: f64,
}

impl Default for HuygensConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec { r_max: 32.0, n: 2048 },
            data: DataSpec::Bumps { seed: 42, ranges: Default::default() },
            lambdas: vec![1.0, 2.0],
            times: vec![20.0, 40.0],
            radii: vec![0.5, 1.0, 2.0, 3.0, 4.0, 6.0],
            finite_tau: 1.0,
        }
    }
}

/// Pointwise density of `|r^{1-2/m}∂_{r,t}w|^m + |r^{-2/m}w|^m` against `dr`
/// (ℝ³ measure included).
pub fn weighted_density(state: &RadialState) -> Result<Vec<f64>> {
    let m = state.params.m();
    let g = state.grid();
    let wr = differentiate(&state.w)?;
    Ok((0..=g.n())
        .map(|i| {
            let r = g.r(i);
            let d = wr.values()[i].abs().powf(m) + state.wt.values()[i].abs().powf(m);
            SPHERE_AREA * (r.powf(m) * d + state.w.values()[i].abs().powf(m))
        })
        .collect())
}

/// `(mass outside |r - τ| <= R, total mass)` at `state.time = τ`.
pub fn mass_outside_shell(state: &RadialState, radius: f64) -> Result<(f64, f64)> {
    let g = state.grid();
    let tau = state.time.abs();
    let dens = weighted_density(state)?;
    let total = trapezoid_window(&dens, 0.0, g.h(), 0.0, g.r_max());
    let inner = if tau - radius > 0.0 {
        trapezoid_window(&dens, 0.0, g.h(), 0.0, tau - radius)
    } else {
        0.0
    };
    let outer = if tau + radius < g.r_max() {
        trapezoid_window(&dens, 0.0, g.h(), tau + radius, g.r_max())
    } else {
        0.0
    };
    Ok((inner + outer, total))
}

/// `(mass on {r >= R} ∪ {r <= 1/R}, total mass)`.
pub fn mass_off_annulus(state: &RadialState, radius: f64) -> Result<(f64, f64)> {
    let g = state.grid();
    let dens = weighted_density(state)?;
    let total = trapezoid_window(&dens, 0.0, g.h(), 0.0, g.r_max());
    let lo = (1.0 / radius).min(g.r_max());
    let inner = trapezoid_window(&dens, 0.0, g.h(), 0.0, lo);
    let outer = if radius < g.r_max() && radius > lo {
        trapezoid_window(&dens, 0.0, g.h(), radius, g.r_max())
    } else if radius <= lo {
        total - inner
    } else {
        0.0
    };
    Ok((inner + outer, total))
}

pub fn run_huygens(params: Params, cfg: &HuygensConfig) -> Result<ExperimentOutput> {
    if cfg.lambdas.len() != cfg.times.len() || cfg.radii.is_empty() {
        return Err(Error::InvalidConfig("need matching lambda/time lists and at least one R".into()));
    }
    let grid = cfg.grid.build()?;
    let data = cfg.data.build(params, grid)?;
    let taus: Vec<f64> = cfg.lambdas.iter().zip(&cfg.times).map(|(l, t)| t / l).collect();
    let t_max = taus.iter().fold(cfg.finite_tau.abs(), |a, t| a.max(t.abs()));
    let profile = build_free_profile(&data, grid.r_max() + t_max)?;
    let r_max_needed = taus.iter().fold(0.0f64, |a, t| a.max(t.abs()))
        + data.support_radius(1e-12)
        + cfg.radii.iter().cloned().fold(0.0, f64::max);
    let mut b = ReportBuilder::new("huygens", Some(params), cfg);
    if r_max_needed > grid.r_max() {
        b.note(format!("grid ends at {} before τ + supp + R = {r_max_needed}", grid.r_max()));
    }

    let mut series = Series::new("residual", &["tau", "R", "residual", "residual_rel"]);
    let mut worst_last = 0.0f64;
    let mut violations = 0usize;
    // compactly supported data: nothing at all may sit outside supp + 2
    let shell = data.support_radius(0.0) + 2.0;
    let mut localized = 0.0f64;
    for &tau in &taus {
        let st = profile.eval_linear(tau, &grid)?;
        let (res, total) = mass_outside_shell(&st, shell)?;
        if total > 0.0 {
            localized = localized.max(res / total);
        }
        let mut rels = Vec::new();
        for &radius in &cfg.radii {
            let (res, total) = mass_outside_shell(&st, radius)?;
            let rel = if total > 0.0 { res / total } else { 0.0 };
            rels.push(rel);
            series.push(vec![tau, radius, res, rel]);
        }
        violations += increases(&rels, 1e-9);
        worst_last = worst_last.max(*rels.last().unwrap());
    }

    let mut fin = Series::new("finite_regime", &["tau", "R", "residual_rel"]);
    let st = profile.eval_linear(cfg.finite_tau, &grid)?;
    let mut fin_rels = Vec::new();
    for &radius in cfg.radii.iter().filter(|&&r| r > 1.0) {
        let (res, total) = mass_off_annulus(&st, radius)?;
        let rel = if total > 0.0 { res / total } else { 0.0 };
        fin_rels.push(rel);
        fin.push(vec![cfg.finite_tau, radius, rel]);
    }
    b.metric("residual_rel_at_largest_r", worst_last)
        .metric("residual_rel_outside_support_shell", localized)
        .metric("monotonicity_violations", violations as f64)
        .metric("finite_regime_violations", increases(&fin_rels, 1e-9) as f64)
        .metric("finite_regime_residual_rel", fin_rels.last().copied().unwrap_or(0.0))
        .series(series)
        .series(fin);
    b.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Sign;

    #[test]
    fn compact_data_leaves_no_mass_off_shell() {
        let params = Params::new(7.0, Sign::Focusing).unwrap();
        let cfg = HuygensConfig::default();
        let grid = cfg.grid.build().unwrap();
        let data = cfg.data.build(params, grid).unwrap();
        let supp = data.support_radius(0.0);
        let prof = build_free_profile(&data, 64.0).unwrap();
        let st = prof.eval_linear(20.0, &grid).unwrap();
        let (res, total) = mass_outside_shell(&st, supp + 2.0).unwrap();
        assert!(total > 0.0);
        assert!(res <= 1e-10 * total, "{res:e} of {total:e}");
    }

    #[test]
    fn default_run_passes() {
        let out = run_huygens(Params::new(7.0, Sign::Focusing).unwrap(), &HuygensConfig::default()).unwrap();
        assert!(out.report.pass, "{:?}", out.report.metrics);
        assert_eq!(out.report.metrics["finite_regime_violations"], 0.0);
    }

    #[test]
    fn gaussian_residual_bounded_by_tail() {
        let params = Params::new(7.0, Sign::Focusing).unwrap();
        let cfg = HuygensConfig {
            data: DataSpec::Gaussian { amplitude: 1.0, width: 1.0, velocity: 0.0 },
            ..Default::default()
        };
        let out = run_huygens(params, &cfg).unwrap();
        assert!(out.report.metrics["residual_rel_at_largest_r"] < 1e-8);
    }
}
