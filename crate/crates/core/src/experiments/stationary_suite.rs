//! Stationary solutions: branch behaviour, far-field asymptotics, the
//! scaling law between different `ℓ`, and odd symmetry.

use serde::{Deserialize, Serialize};

use super::report::{ExperimentOutput, ReportBuilder, Series};
use crate::error::{Error, Result};
use crate::model::{Params, Sign};
use crate::stationary::{evaluate_z, scaling_check, stationary_solution, StationaryConfig, StationarySolution};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StationarySuiteConfig {
    pub ells: Vec<f64>,
    /// Signs of the nonlinearity to cover; empty means the run's own sign.
    pub signs: Vec<Sign>,
    pub stationary: StationaryConfig,
    /// Looser tolerances for the robustness rerun of `R_1`.
    pub loose_rtol: f64,
    pub loose_atol: f64,
}

impl Default for StationarySuiteConfig {
    fn default() -> Self {
        Self {
            ells: vec![1.0, 2.0, 4.0, -1.0],
            signs: vec![Sign::Defocusing, Sign::Focusing],
            stationary: StationaryConfig::default(),
            loose_rtol: 1e-8,
            loose_atol: 1e-10,
        }
    }
}

pub fn solution_series(sol: &StationarySolution, name: &str) -> Series {
    let mut s = Series::new(name, &["r", "Z", "dZ", "r2_defect"]);
    for (&(r, z, dz), d) in sol.samples.iter().zip(sol.r2_defects()) {
        s.push(vec![r, z, dz, d]);
    }
    s
}

fn branch_ok(sol: &StationarySolution, cfg: &StationaryConfig, iota: Sign) -> bool {
    match iota {
        Sign::Focusing => {
            sol.r_ell == 0.0
                && sol.r_inner() <= (1.0 / cfg.s_cap) * (1.0 + 1e-9)
                && sol.samples.iter().all(|s| s.1.is_finite() && s.1.abs() < cfg.blowup_level)
        }
        Sign::Defocusing => sol.r_ell > 0.0 && sol.samples[0].1.abs() > 1e6,
    }
}

#[derive(Debug, Default)]
struct SignSummary {
    violations: usize,
    slope_def: f64,
    ratio_def: f64,
    point_def: f64,
    r2_outer: f64,
    robustness: f64,
    symmetry: f64,
    nonmembership: usize,
}

fn sign_name(iota: Sign) -> &'static str {
    match iota {
        Sign::Focusing => "focusing",
        Sign::Defocusing => "defocusing",
    }
}

fn run_sign(params: Params, cfg: &StationarySuiteConfig, b: &mut ReportBuilder) -> Result<SignSummary> {
    let st = &cfg.stationary;
    let iota = params.iota();
    let tag = sign_name(iota);
    let mut out = SignSummary::default();
    for &ell in &cfg.ells {
        let sol = stationary_solution(ell, &params, st)?;
        if !branch_ok(&sol, st, iota) {
            out.violations += 1;
        }
        out.slope_def = out.slope_def.max(sol.outer_slope_defect.abs() / ell.abs());
        b.metric(&format!("R_ell[{tag},{ell}]"), sol.r_ell);
        if ell > 0.0 && ell != 1.0 {
            let sc = scaling_check(ell, &params, st)?;
            out.ratio_def = out.ratio_def.max(sc.radius_ratio);
            out.point_def = out.point_def.max(sc.max_pointwise);
            b.metric(&format!("radius_ratio_defect[{tag},{ell}]"), sc.radius_ratio);
        }
        b.series(solution_series(&sol, &format!("z_ell_{tag}_{ell}")));
    }

    let one = stationary_solution(1.0, &params, st)?;
    out.r2_outer = one.max_r2_defect_on(10.0, 1e3);
    if iota == Sign::Defocusing {
        let loose = StationaryConfig { rtol: cfg.loose_rtol, atol: cfg.loose_atol, ..*st };
        let other = stationary_solution(1.0, &params, &loose)?;
        out.robustness = (other.r_ell / one.r_ell - 1.0).abs();
        b.metric(&format!("R_ell_loose[{tag},1]"), other.r_ell);
    }

    let probe: Vec<f64> = [2.0, 3.0, 5.0, 10.0, 50.0, 200.0]
        .iter()
        .map(|r| r * one.r_ell.max(0.05))
        .collect();
    let plus = evaluate_z(1.0, &params, st, &probe)?;
    let minus = evaluate_z(-1.0, &params, st, &probe)?;
    out.symmetry = plus.iter().zip(&minus).map(|(a, c)| (a + c).abs()).fold(0.0, f64::max);

    // Z ∉ Ḣ^{s_c} near the origin (focusing): ∫_ε^1 r^m|Z'|^m dr keeps growing
    if iota == Sign::Focusing {
        let masses: Vec<f64> = [1e-1, 1e-2, 1e-3]
            .iter()
            .map(|&e| one.derivative_mass(e, 1.0, params.m()))
            .collect();
        for w in masses.windows(2) {
            if !(w[1] > 1.05 * w[0]) {
                out.nonmembership += 1;
            }
        }
        for (e, v) in [1e-1, 1e-2, 1e-3].iter().zip(&masses) {
            b.metric(&format!("derivative_mass[{tag},{e}]"), *v);
        }
    }
    Ok(out)
}

/// Runs every sign in `cfg.signs` (the sign of `params` when empty) and
/// reports the worst case over them.
pub fn run_stationary_suite(params: Params, cfg: &StationarySuiteConfig) -> Result<ExperimentOutput> {
    if cfg.ells.contains(&0.0) {
        return Err(Error::ZeroEll);
    }
    let signs = if cfg.signs.is_empty() { vec![params.iota()] } else { cfg.signs.clone() };
    let mut b = ReportBuilder::new("stationary", Some(params), cfg);
    let mut agg = SignSummary::default();
    for iota in signs {
        let s = run_sign(params.with_sign(iota), cfg, &mut b)?;
        agg.violations += s.violations;
        agg.nonmembership += s.nonmembership;
        agg.slope_def = agg.slope_def.max(s.slope_def);
        agg.ratio_def = agg.ratio_def.max(s.ratio_def);
        agg.point_def = agg.point_def.max(s.point_def);
        agg.r2_outer = agg.r2_outer.max(s.r2_outer);
        agg.robustness = agg.robustness.max(s.robustness);
        agg.symmetry = agg.symmetry.max(s.symmetry);
    }
    b.metric("branch_violations", agg.violations as f64)
        .metric("max_outer_slope_defect", agg.slope_def)
        .metric("max_r2_defect_outer", agg.r2_outer)
        .metric("max_radius_ratio_defect", agg.ratio_def)
        .metric("max_pointwise_scaling_defect", agg.point_def)
        .metric("tolerance_robustness", agg.robustness)
        .metric("sign_symmetry_defect", agg.symmetry)
        .metric("nonmembership_violations", agg.nonmembership as f64);
    b.finish()
}
