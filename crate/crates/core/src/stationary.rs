//! Singular stationary solutions `Z_ℓ` of `-ΔZ = ι|Z|^{p-1}Z` with
//! `r Z(r) → ℓ` as `r → ∞`.
//!
//! The inversion `h(s) = Z(1/s)` turns the radial equation into
//! `h'' = -ι s⁻⁴ |h|^{p-1} h`, regular at `s = 0` with `h(s)/s → ℓ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{signed_pow, Params, Sign};
use crate::ode::{integrate_through_blowup, Termination, Tolerances};

/// Largest accepted relative defect of the two-term series at `s0`.
pub const SERIES_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StationaryConfig {
    pub s0: f64,
    /// Integration end in `s`; `1/s_cap` is the inner radius floor.
    pub s_cap: f64,
    /// `|h|` level at which a divergence is declared.
    pub blowup_level: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Log-spaced dense output density in `r`.
    pub samples_per_decade: usize,
}

impl Default for StationaryConfig {
    fn default() -> Self {
        Self {
            s0: 1e-3,
            s_cap: 1e3,
            blowup_level: 1e8,
            rtol: 1e-10,
            atol: 1e-12,
            samples_per_decade: 50,
        }
    }
}

impl StationaryConfig {
    fn tolerances(&self) -> Tolerances {
        Tolerances { rtol: self.rtol, atol: self.atol, ..Tolerances::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HSolution {
    pub params: Params,
    pub ell: f64,
    pub s0: f64,
    /// `(s, h, h')` in increasing `s`: accepted steps merged with requested outputs.
    pub samples: Vec<(f64, f64, f64)>,
    /// Values at the requested abscissae that were reached.
    pub outputs: Vec<(f64, f64, f64)>,
    /// Blow-up abscissa and the width of its error bar.
    pub s_star: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationarySolution {
    pub params: Params,
    pub ell: f64,
    /// `(r, Z, Z')` in increasing `r`.
    pub samples: Vec<(f64, f64, f64)>,
    /// Inner radius: `1/s_star` on divergence, `0` otherwise.
    pub r_ell: f64,
    pub r_ell_error: f64,
    /// `max r²|rZ - ℓ|` over `r >= r_outer/2`.
    pub asymptotic_defect: f64,
    /// `r² Z'(r) + ℓ` at the outermost sample.
    pub outer_slope_defect: f64,
}

impl StationarySolution {
    pub fn r_inner(&self) -> f64 {
        self.samples.first().map_or(f64::NAN, |s| s.0)
    }

    pub fn r_outer(&self) -> f64 {
        self.samples.last().map_or(f64::NAN, |s| s.0)
    }

    /// `r²|rZ(r) - ℓ|` at every sample.
    pub fn r2_defects(&self) -> Vec<f64> {
        self.samples
            .iter()
            .map(|&(r, z, _)| r * r * (r * z - self.ell).abs())
            .collect()
    }

    pub fn max_r2_defect_on(&self, lo: f64, hi: f64) -> f64 {
        self.samples
            .iter()
            .zip(self.r2_defects())
            .filter(|((r, _, _), _)| *r >= lo && *r <= hi)
            .map(|(_, d)| d)
            .fold(0.0, f64::max)
    }

    /// `∫_ε^{r_hi} r^m |Z'|^m dr` by the trapezoid rule in `ln r`.
    pub fn derivative_mass(&self, eps: f64, r_hi: f64, m: f64) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .samples
            .iter()
            .filter(|s| s.0 >= eps && s.0 <= r_hi)
            .map(|&(r, _, dz)| (r.ln(), r.powf(m + 1.0) * dz.abs().powf(m)))
            .collect();
        pts.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum()
    }
}

fn check_ell(ell: f64) -> Result<()> {
    if ell == 0.0 || !ell.is_finite() {
        return Err(Error::ZeroEll);
    }
    Ok(())
}

fn rhs(params: &Params, s: f64, h: f64) -> f64 {
    -params.iota_value() * signed_pow(h, params.p()) / s.powi(4)
}

/// Two-term series `(h(s0), h'(s0))`.
pub fn series_init(ell: f64, s0: f64, params: &Params) -> Result<(f64, f64)> {
    check_ell(ell)?;
    let p = params.p();
    let c = params.iota_value() * signed_pow(ell, p);
    let h = ell * s0 - c * s0.powf(p - 2.0) / ((p - 2.0) * (p - 3.0));
    let hp = ell - c * s0.powf(p - 3.0) / (p - 3.0);
    Ok((h, hp))
}

/// Relative residual `s0² |h''_series - RHS(h_series)| / |h_series|`.
pub fn series_defect(ell: f64, s0: f64, params: &Params) -> Result<f64> {
    let (h, _) = series_init(ell, s0, params)?;
    let p = params.p();
    let hpp = -params.iota_value() * signed_pow(ell, p) * s0.powf(p - 4.0);
    Ok(s0 * s0 * (hpp - rhs(params, s0, h)).abs() / h.abs())
}

fn log_outputs(s0: f64, s_cap: f64, per_decade: usize) -> Vec<f64> {
    if per_decade == 0 {
        return Vec::new();
    }
    let decades = (s_cap / s0).log10();
    let count = (decades * per_decade as f64).ceil() as usize;
    (1..=count)
        .map(|k| (s0.ln() + (s_cap / s0).ln() * k as f64 / count as f64).exp())
        .collect()
}

/// Integrate the h-equation from the series at `s0` to `s_cap`, with extra
/// output abscissae `extra` (any order, values outside the range ignored).
pub fn integrate_h_with(
    ell: f64,
    params: &Params,
    cfg: &StationaryConfig,
    extra: &[f64],
) -> Result<HSolution> {
    check_ell(ell)?;
    let s0 = cfg.s0;
    if !(s0 > 0.0) || !(cfg.s_cap > s0) {
        return Err(Error::InvalidConfig(format!("need 0 < s0 < s_cap, got {s0}, {}", cfg.s_cap)));
    }
    let defect = series_defect(ell, s0, params)?;
    if defect > SERIES_TOLERANCE {
        return Err(Error::SeriesRegionExceeded { s0, defect });
    }
    let (h0, hp0) = series_init(ell, s0, params)?;
    let mut outputs = log_outputs(s0, cfg.s_cap, cfg.samples_per_decade);
    outputs.extend(extra.iter().copied().filter(|&s| s > s0 && s <= cfg.s_cap));
    outputs.sort_by(f64::total_cmp);
    outputs.dedup();

    let pr = *params;
    let trace = integrate_through_blowup(
        move |s, h| rhs(&pr, s, h),
        s0,
        h0,
        hp0,
        cfg.s_cap,
        cfg.blowup_level,
        1e3_f64.min(cfg.blowup_level),
        params.p(),
        &cfg.tolerances(),
        &outputs,
    );
    if matches!(trace.termination, Termination::MaxSteps | Termination::NonFinite) && trace.blowup.is_none() {
        return Err(Error::Mismatch(format!(
            "h-integration stopped early ({:?})",
            trace.termination
        )));
    }
    let mut samples = trace.samples;
    samples.extend(trace.outputs.iter().copied());
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    samples.dedup();
    Ok(HSolution {
        params: *params,
        ell,
        s0,
        samples,
        outputs: trace.outputs,
        s_star: trace.blowup,
    })
}

pub fn integrate_h(ell: f64, params: &Params, s0: f64, s_cap: f64) -> Result<HSolution> {
    let cfg = StationaryConfig { s0, s_cap, ..StationaryConfig::default() };
    integrate_h_with(ell, params, &cfg, &[])
}

/// Halve `cfg.s0` until the series start is accurate enough.
pub fn admissible_s0(ell: f64, params: &Params, cfg: &StationaryConfig) -> Result<f64> {
    let mut s0 = cfg.s0;
    for _ in 0..200 {
        if series_defect(ell, s0, params)? <= SERIES_TOLERANCE {
            return Ok(s0);
        }
        s0 *= 0.5;
    }
    Err(Error::SeriesRegionExceeded { s0, defect: series_defect(ell, s0, params)? })
}

pub fn z_from_h(hsol: &HSolution) -> StationarySolution {
    let ell = hsol.ell;
    let samples: Vec<(f64, f64, f64)> = hsol
        .samples
        .iter()
        .rev()
        .map(|&(s, h, hp)| (1.0 / s, h, -s * s * hp))
        .collect();
    let (r_ell, r_ell_error) = match hsol.s_star {
        Some((s_star, width)) => (1.0 / s_star, width / (s_star * s_star)),
        None => (0.0, 0.0),
    };
    let r_outer = samples.last().map_or(0.0, |s| s.0);
    let asymptotic_defect = samples
        .iter()
        .filter(|s| s.0 >= 0.5 * r_outer)
        .map(|&(r, z, _)| r * r * (r * z - ell).abs())
        .fold(0.0, f64::max);
    let outer_slope_defect = samples.last().map_or(f64::NAN, |&(r, _, dz)| r * r * dz + ell);
    StationarySolution {
        params: hsol.params,
        ell,
        samples,
        r_ell,
        r_ell_error,
        asymptotic_defect,
        outer_slope_defect,
    }
}

pub fn stationary_solution(ell: f64, params: &Params, cfg: &StationaryConfig) -> Result<StationarySolution> {
    let s0 = admissible_s0(ell, params, cfg)?;
    let cfg = StationaryConfig { s0, ..*cfg };
    Ok(z_from_h(&integrate_h_with(ell, params, &cfg, &[])?))
}

/// `Z_ℓ` at the given radii, each of which must lie in `[1/s_cap, 1/s0]`
/// and outside the inner radius.
pub fn evaluate_z(ell: f64, params: &Params, cfg: &StationaryConfig, radii: &[f64]) -> Result<Vec<f64>> {
    let s0 = admissible_s0(ell, params, cfg)?;
    let cfg = StationaryConfig { s0, samples_per_decade: 0, ..*cfg };
    let mut out = vec![f64::NAN; radii.len()];
    let mut wanted: Vec<(f64, usize)> = Vec::new();
    for (k, &r) in radii.iter().enumerate() {
        if !(r > 0.0) {
            return Err(Error::NegativeRadius(r));
        }
        let s = 1.0 / r;
        if s <= s0 {
            // far field: the series itself is within tolerance
            out[k] = series_init(ell, s, params)?.0;
        } else if s > cfg.s_cap {
            return Err(Error::BadRadius(r, 1.0 / cfg.s_cap));
        } else {
            wanted.push((s, k));
        }
    }
    let abscissae: Vec<f64> = wanted.iter().map(|w| w.0).collect();
    let hsol = integrate_h_with(ell, params, &cfg, &abscissae)?;
    for (s, k) in wanted {
        match hsol.outputs.iter().find(|o| o.0 == s) {
            Some(o) => out[k] = o.1,
            None => return Err(Error::BlowupEncountered(1.0 / s)),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingDefects {
    pub lambda: f64,
    pub max_pointwise: f64,
    /// `|R_ℓ λ / R_1 - 1|`; zero when neither branch diverges.
    pub radius_ratio: f64,
    pub r_ell: f64,
    pub r_one: f64,
}

/// Compare `Z_ℓ` with the rescaled `λ^{2/(p-1)} Z_1(λ r)`,
/// `λ = |ℓ|^{-(p-1)/(p-3)}`, on `r ∈ [max(2R_ℓ, r_lo), r_hi]`; negative `ℓ`
/// uses `Z_{-ℓ} = -Z_ℓ`.
pub fn scaling_check(ell: f64, params: &Params, cfg: &StationaryConfig) -> Result<ScalingDefects> {
    check_ell(ell)?;
    let p = params.p();
    let lambda = ell.abs().powf(-(p - 1.0) / (p - 3.0));
    let sign = ell.signum();
    let z_ell = stationary_solution(ell, params, cfg)?;
    let z_one = stationary_solution(1.0, params, cfg)?;
    let r_lo = (2.0 * z_ell.r_ell).max(1e-2).max(2.0 * z_one.r_ell / lambda);
    let r_hi = 100.0_f64.min(0.5 / (cfg.s0 * lambda.max(1.0)));
    let count = 400;
    let radii: Vec<f64> = (0..=count)
        .map(|k| (r_lo.ln() + (r_hi / r_lo).ln() * k as f64 / count as f64).exp())
        .collect();
    let direct = evaluate_z(ell, params, cfg, &radii)?;
    let scaled_radii: Vec<f64> = radii.iter().map(|r| lambda * r).collect();
    let base = evaluate_z(1.0, params, cfg, &scaled_radii)?;
    let factor = sign * lambda.powf(2.0 / (p - 1.0));
    let max_pointwise = direct
        .iter()
        .zip(&base)
        .map(|(d, b)| (d - factor * b).abs() / d.abs())
        .fold(0.0, f64::max);
    let radius_ratio = if z_one.r_ell > 0.0 {
        (z_ell.r_ell * lambda / z_one.r_ell - 1.0).abs()
    } else if z_ell.r_ell == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(ScalingDefects {
        lambda,
        max_pointwise,
        radius_ratio,
        r_ell: z_ell.r_ell,
        r_one: z_one.r_ell,
    })
}

/// Convenience for the two sign branches.
pub fn params_with(params: &Params, iota: Sign) -> Params {
    params.with_sign(iota)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p7(iota: Sign) -> Params {
        Params::new(7.0, iota).unwrap()
    }

    #[test]
    fn series_leading_order_and_sign() {
        let de = p7(Sign::Defocusing);
        let (h, hp) = series_init(1.0, 1e-3, &de).unwrap();
        assert_relative_eq!(h, 1e-3, max_relative = 1e-10);
        assert_relative_eq!(hp, 1.0, max_relative = 1e-10);
        // defocusing correction raises h (h'' > 0)
        assert!(h > 1e-3 && hp > 1.0);
        let fo = p7(Sign::Focusing);
        let (hf, _) = series_init(1.0, 1e-3, &fo).unwrap();
        assert!(hf < 1e-3);
        assert_eq!(series_init(0.0, 1e-3, &fo), Err(Error::ZeroEll));
    }

    #[test]
    fn series_residual_is_tiny() {
        let de = p7(Sign::Defocusing);
        assert!(series_defect(1.0, 1e-3, &de).unwrap() <= 1e-10);
        assert!(series_defect(1.0, 0.5, &de).unwrap() > SERIES_TOLERANCE);
        assert!(matches!(integrate_h(1.0, &de, 0.5, 10.0), Err(Error::SeriesRegionExceeded { .. })));
        let cfg = StationaryConfig { s0: 0.5, ..Default::default() };
        assert!(admissible_s0(1.0, &de, &cfg).unwrap() < 0.5);
    }

    #[test]
    fn focusing_reaches_floor() {
        let sol = stationary_solution(1.0, &p7(Sign::Focusing), &StationaryConfig::default()).unwrap();
        assert_eq!(sol.r_ell, 0.0);
        assert_relative_eq!(sol.r_inner(), 1e-3, max_relative = 1e-12);
        assert!(sol.samples.iter().all(|s| s.1.is_finite() && s.1.abs() < 1e3));
        assert!(sol.outer_slope_defect.abs() < 1e-4);
        assert!(sol.asymptotic_defect < 1.0);
    }

    #[test]
    fn defocusing_diverges_at_positive_radius() {
        let de = p7(Sign::Defocusing);
        let hsol = integrate_h(1.0, &de, 1e-3, 1e3).unwrap();
        for &(s, h, hp) in &hsol.samples {
            assert!(rhs(&de, s, h) > 0.0);
            assert!(hp >= 0.5 && h >= 0.5 * s);
        }
        let sol = z_from_h(&hsol);
        assert!(sol.r_ell > 0.0);
        let (_, z_last, _) = sol.samples[0];
        assert!(z_last.abs() > 1e6);
        let loose = StationaryConfig { rtol: 1e-8, atol: 1e-10, ..Default::default() };
        let sol2 = stationary_solution(1.0, &de, &loose).unwrap();
        assert!((sol2.r_ell / sol.r_ell - 1.0).abs() <= 1e-4);
    }

    #[test]
    fn sign_symmetry() {
        for iota in [Sign::Focusing, Sign::Defocusing] {
            let pr = p7(iota);
            let cfg = StationaryConfig::default();
            let radii = [1.5, 3.0, 20.0, 500.0, 5000.0];
            let a = evaluate_z(1.3, &pr, &cfg, &radii).unwrap();
            let b = evaluate_z(-1.3, &pr, &cfg, &radii).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert_eq!(*x, -*y);
            }
        }
    }

    #[test]
    fn scaling_self_comparison_and_ell_two() {
        let de = p7(Sign::Defocusing);
        let cfg = StationaryConfig::default();
        let one = scaling_check(1.0, &de, &cfg).unwrap();
        assert_eq!(one.max_pointwise, 0.0);
        assert_eq!(one.radius_ratio, 0.0);
        let two = scaling_check(2.0, &de, &cfg).unwrap();
        assert_relative_eq!(two.r_ell / two.r_one, 2f64.powf(1.5), max_relative = 1e-2);
        assert!(two.radius_ratio < 1e-2, "{}", two.radius_ratio);
        assert!(two.max_pointwise <= 1e-6, "{}", two.max_pointwise);
    }
}
