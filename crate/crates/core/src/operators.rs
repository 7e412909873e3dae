//! Truncation and cutoff operators on radial functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{RadialState, SampledFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutoffKind {
    /// `T_R`: freeze the function at its value `φ(R)` inside the ball.
    FreezeInside,
    /// `χ_R φ` with the smooth exterior cutoff `χ(|x|/R)`.
    SmoothExterior,
    /// `1_{|x| >= R} φ`.
    IndicatorExterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub kind: CutoffKind,
    pub radius: f64,
}

impl CutoffSpec {
    pub fn apply(&self, phi: &SampledFunction) -> Result<SampledFunction> {
        match self.kind {
            CutoffKind::FreezeInside => truncate_t(phi, self.radius),
            CutoffKind::SmoothExterior => cutoff_chi(phi, self.radius),
            CutoffKind::IndicatorExterior => indicator_exterior(phi, self.radius),
        }
    }
}

fn check_radius(phi: &SampledFunction, radius: f64, allow_beyond: bool) -> Result<()> {
    let r_max = phi.grid().r_max();
    if !(radius > 0.0) || (!allow_beyond && radius > r_max * (1.0 + 1e-12)) {
        return Err(Error::BadRadius(radius, r_max));
    }
    Ok(())
}

/// `T_R φ(r) = φ(R)` for `r <= R`, `φ(r)` otherwise.
pub fn truncate_t(phi: &SampledFunction, radius: f64) -> Result<SampledFunction> {
    check_radius(phi, radius, false)?;
    let at_r = phi.interpolate(radius);
    Ok(phi.map(|r, v| if r <= radius { at_r } else { v }))
}

/// Smooth profile with `χ = 0` on `[0, 1/4]` and `χ = 1` on `[1/2, ∞)`,
/// joined by the quintic `6u⁵ - 15u⁴ + 10u³`, `u = 4x - 1`.
pub fn chi(x: f64) -> f64 {
    if x <= 0.25 {
        0.0
    } else if x >= 0.5 {
        1.0
    } else {
        let u = 4.0 * x - 1.0;
        u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
    }
}

pub fn cutoff_chi(phi: &SampledFunction, radius: f64) -> Result<SampledFunction> {
    check_radius(phi, radius, true)?;
    Ok(phi.map(|r, v| chi(r / radius) * v))
}

pub fn indicator_exterior(phi: &SampledFunction, radius: f64) -> Result<SampledFunction> {
    check_radius(phi, radius, false)?;
    Ok(phi.map(|r, v| if r >= radius { v } else { 0.0 }))
}

/// `(T_R w₀, 1_{|x| >= R} w₁)`.
pub fn exterior_data(pair: &RadialState, radius: f64) -> Result<RadialState> {
    Ok(RadialState {
        params: pair.params,
        w: truncate_t(&pair.w, radius)?,
        wt: indicator_exterior(&pair.wt, radius)?,
        time: pair.time,
    })
}
