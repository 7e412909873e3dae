//! Norms and energies: the `L^m` generalized energy and its exterior part,
//! weighted Hardy norms, the two sides of the `u ↔ v = r u` equivalence,
//! radial homogeneous Sobolev norms and the conserved nonlinear energy.
//!
//! Lebesgue norms on ℝ³ of radial functions use the measure `4π r² dr`.

use std::f64::consts::PI;

use rustfft::{num_complex::Complex64, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{differentiate, trapezoid_window, RadialState, SampledFunction};

/// Surface factor of the radial measure on ℝ³.
pub const SPHERE_AREA: f64 = 4.0 * PI;

/// Relative tail level above which [`sobolev_norm_radial`] refuses to run.
pub const DECAY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    /// `E_m = ∫ |∂_r(rw)|^m + |∂_t(rw)|^m dr`.
    pub e_m: f64,
    /// `½∫|∇w|² + ½∫|∂_t w|²` over ℝ³.
    pub e_2: f64,
    pub gradient: f64,
    pub kinetic: f64,
    /// `-ι/(p+1) ∫ |w|^{p+1}` over ℝ³.
    pub potential: f64,
    pub total_nonlinear: f64,
}

fn reduced_integrands(state: &RadialState) -> Result<(Vec<f64>, Vec<f64>)> {
    let dv = differentiate(&state.v())?.into_values();
    let vt = state.vt().into_values();
    Ok((dv, vt))
}

fn energy_density(state: &RadialState) -> Result<Vec<f64>> {
    let m = state.params.m();
    let (dv, vt) = reduced_integrands(state)?;
    Ok(dv
        .iter()
        .zip(&vt)
        .map(|(a, b)| a.abs().powf(m) + b.abs().powf(m))
        .collect())
}

/// `E_m = ∫_0^{r_max} |∂_r(rw)|^m + |∂_t(rw)|^m dr`.
pub fn generalized_energy(state: &RadialState) -> Result<f64> {
    let g = state.grid();
    let dens = energy_density(state)?;
    Ok(trapezoid_window(&dens, 0.0, g.h(), 0.0, g.r_max()))
}

/// `E_{m,R}(t) = ∫_{R+|t|}^{r_max} |∂_r(rw)|^m + |∂_t(rw)|^m dr`, `t = state.time`.
pub fn exterior_generalized_energy(state: &RadialState, radius: f64) -> Result<f64> {
    if radius < 0.0 {
        return Err(Error::NegativeRadius(radius));
    }
    let g = state.grid();
    let start = radius + state.time.abs();
    if start > g.r_max() * (1.0 + 1e-12) {
        return Err(Error::ConeLeftDomain(start, g.r_max()));
    }
    let dens = energy_density(state)?;
    Ok(trapezoid_window(&dens, 0.0, g.h(), start, g.r_max()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HardyMode {
    /// `‖r^{1-2/m} φ‖_{L^m(ℝ³)}`
    Position,
    /// `‖r^{1-2/m} ∂_r φ‖_{L^m(ℝ³)}`
    Derivative,
}

/// `‖r^a φ‖_{L^m(ℝ³)}` over `[0, r_max]`.
pub fn weighted_lm_norm(phi: &SampledFunction, weight_power: f64, m: f64) -> f64 {
    let g = phi.grid();
    let expo = m * weight_power + 2.0;
    let vals: Vec<f64> = phi
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let r = g.r(i);
            let w = if r == 0.0 {
                if expo > 0.0 {
                    0.0
                } else if expo == 0.0 {
                    1.0
                } else {
                    // integrable singularity: drop the origin sample
                    0.0
                }
            } else {
                r.powf(expo)
            };
            w * v.abs().powf(m)
        })
        .collect();
    (SPHERE_AREA * trapezoid_window(&vals, 0.0, g.h(), 0.0, g.r_max())).powf(1.0 / m)
}

/// `‖φ‖_{L^q(ℝ³)}` over `[0, r_max]`.
pub fn lebesgue_norm(phi: &SampledFunction, q: f64) -> f64 {
    weighted_lm_norm(phi, 0.0, q)
}

pub fn hardy_weighted_norm(phi: &SampledFunction, mode: HardyMode, m: f64) -> Result<f64> {
    if !(m > 2.0) {
        return Err(Error::PreconditionViolated(format!("Hardy norms need m > 2, got {m}")));
    }
    let a = 1.0 - 2.0 / m;
    Ok(match mode {
        HardyMode::Position => weighted_lm_norm(phi, a, m),
        HardyMode::Derivative => weighted_lm_norm(&differentiate(phi)?, a, m),
    })
}

/// Both sides of the equivalence
/// `∫_R r^m |∂_r φ|^m dr ≈ ∫_R |∂_r(rφ)|^m dr + R|φ(R)|^m`.
pub fn utov_sides(phi: &SampledFunction, radius: f64, m: f64) -> Result<(f64, f64)> {
    let g = phi.grid();
    if !(radius >= 0.0) || radius >= g.r_max() {
        return Err(Error::BadRadius(radius, g.r_max()));
    }
    let d = differentiate(phi)?;
    let dv = differentiate(&phi.times_r())?;
    let lhs_vals: Vec<f64> = d
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| (g.r(i) * v.abs()).powf(m))
        .collect();
    let rhs_vals: Vec<f64> = dv.values().iter().map(|v| v.abs().powf(m)).collect();
    let lhs = trapezoid_window(&lhs_vals, 0.0, g.h(), radius, g.r_max());
    let boundary = if radius == 0.0 {
        0.0
    } else {
        radius * phi.interpolate(radius).abs().powf(m)
    };
    let rhs = trapezoid_window(&rhs_vals, 0.0, g.h(), radius, g.r_max()) + boundary;
    Ok((lhs, rhs))
}

/// `‖φ‖_{Ḣ^s(ℝ³)}` through the odd extension `f̃(r) = r φ(r)` on the line:
/// `‖φ‖²_{Ḣ^s(ℝ³)} = ∫_ℝ |ξ|^{2s} |f̃^(ξ)|² dξ` with `f̃^(ξ) = ∫ e^{-ixξ} f̃(x) dx`.
///
/// The transform is a zero-padded DFT (window at least four times the data
/// extent) of the samples tapered by a raised cosine on the outer tenth.
pub fn sobolev_norm_radial(phi: &SampledFunction, s: f64) -> Result<f64> {
    if !(0.0..1.5).contains(&s) {
        return Err(Error::SobolevOrder(s));
    }
    let g = phi.grid();
    let n = g.n();
    let h = g.h();
    let rphi: Vec<f64> = phi
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| g.r(i) * v)
        .collect();
    let max = rphi.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if max == 0.0 {
        return Ok(0.0);
    }
    let tail = rphi[n].abs();
    if tail > DECAY_TOLERANCE * max {
        return Err(Error::DecayViolated { tail, max });
    }

    let taper_start = 0.9 * g.r_max();
    let taper_width = g.r_max() - taper_start;
    let taper = |r: f64| {
        if r <= taper_start {
            1.0
        } else {
            0.5 * (1.0 + (PI * (r - taper_start) / taper_width).cos())
        }
    };

    let size = (4 * (2 * n + 1)).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); size];
    for i in 1..=n {
        let val = rphi[i] * taper(g.r(i));
        buf[i] = Complex64::new(val, 0.0);
        buf[size - i] = Complex64::new(-val, 0.0);
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);

    let dxi = 2.0 * PI / (size as f64 * h);
    let mut acc = 0.0;
    for (k, c) in buf.iter().enumerate() {
        let kk = if k <= size / 2 { k as f64 } else { k as f64 - size as f64 };
        let xi = kk.abs() * dxi;
        if xi == 0.0 {
            continue;
        }
        acc += xi.powf(2.0 * s) * c.norm_sqr();
    }
    Ok((acc * h * h * dxi).sqrt())
}

/// `E = ½∫|∇w|² + ½∫|∂_t w|² - ι/(p+1)∫|w|^{p+1}` over ℝ³, together with `E_m`.
pub fn nonlinear_energy(state: &RadialState) -> Result<EnergyBreakdown> {
    let g = state.grid();
    let h = g.h();
    let p = state.params.p();
    let wr = differentiate(&state.w)?;
    let integrate = |vals: Vec<f64>| trapezoid_window(&vals, 0.0, h, 0.0, g.r_max());
    let r2 = |i: usize| {
        let r = g.r(i);
        r * r
    };
    let gradient = 0.5
        * SPHERE_AREA
        * integrate(wr.values().iter().enumerate().map(|(i, d)| r2(i) * d * d).collect());
    let kinetic = 0.5
        * SPHERE_AREA
        * integrate(state.wt.values().iter().enumerate().map(|(i, d)| r2(i) * d * d).collect());
    let lp = SPHERE_AREA
        * integrate(
            state
                .w
                .values()
                .iter()
                .enumerate()
                .map(|(i, w)| r2(i) * w.abs().powf(p + 1.0))
                .collect(),
        );
    let potential = -state.params.iota_value() / (p + 1.0) * lp;
    let e_2 = gradient + kinetic;
    Ok(EnergyBreakdown {
        e_m: generalized_energy(state)?,
        e_2,
        gradient,
        kinetic,
        potential,
        total_nonlinear: e_2 + potential,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RadialGrid;
    use crate::model::{Params, Sign};
    use approx::assert_abs_diff_eq;

    fn p7() -> Params {
        Params::new(7.0, Sign::Focusing).unwrap()
    }

    /// Composite Simpson on [a, b] with `n` (even) panels; test-only oracle.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for k in 1..n {
            s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn zero_state_has_zero_energies() {
        let g = RadialGrid::new(4.0, 64).unwrap();
        let s = RadialState::zero(p7(), g);
        assert_eq!(generalized_energy(&s).unwrap(), 0.0);
        let e = nonlinear_energy(&s).unwrap();
        assert_eq!(e.total_nonlinear, 0.0);
        assert_eq!(e.e_2, 0.0);
        assert_eq!(e.potential, 0.0);
    }

    #[test]
    fn gaussian_generalized_energy() {
        let g = RadialGrid::new(6.0, 4000).unwrap();
        let s = RadialState::from_fns(p7(), g, |r| (-r * r).exp(), |_| 0.0);
        let oracle = simpson(|r| ((1.0 - 2.0 * r * r) * (-r * r).exp()).abs().powi(3), 0.0, 6.0, 60000);
        let e = generalized_energy(&s).unwrap();
        assert!((e - oracle).abs() <= 1e-4 * oracle, "{e} vs {oracle}");
    }

    #[test]
    fn exterior_energy_limits() {
        let g = RadialGrid::new(4.0, 400).unwrap();
        let s = RadialState::from_fns(p7(), g, |r| (-r * r).exp(), |r| r * (-r * r).exp());
        assert_eq!(
            exterior_generalized_energy(&s, 0.0).unwrap(),
            generalized_energy(&s).unwrap()
        );
        let compact = RadialState::from_fns(
            p7(),
            g,
            |r| if r < 1.0 { (1.0 - r * r).powi(3) } else { 0.0 },
            |_| 0.0,
        );
        assert_eq!(exterior_generalized_energy(&compact, 1.5).unwrap(), 0.0);
        let mut late = s.clone();
        late.time = 3.0;
        assert!(matches!(
            exterior_generalized_energy(&late, 1.5),
            Err(Error::ConeLeftDomain(..))
        ));
    }

    #[test]
    fn exterior_energy_monotone_in_radius() {
        let g = RadialGrid::new(5.0, 500).unwrap();
        let s = RadialState::from_fns(p7(), g, |r| (r - 1.0).sin() * (-r * r).exp(), |r| (-r).exp() * r);
        let mut prev = f64::INFINITY;
        for k in 0..40 {
            let e = exterior_generalized_energy(&s, k as f64 * 0.1).unwrap();
            assert!(e <= prev);
            prev = e;
        }
    }

    #[test]
    fn hardy_norm_examples() {
        let g = RadialGrid::new(1.0, 1000).unwrap();
        let zero = SampledFunction::zeros(g);
        assert_eq!(hardy_weighted_norm(&zero, HardyMode::Position, 3.0).unwrap(), 0.0);
        // φ = r on [0, 1]: ∂_r φ = 1, weight r^{1/3}, measure 4π r² dr
        let lin = SampledFunction::from_fn(g, |r| r);
        let d = hardy_weighted_norm(&lin, HardyMode::Derivative, 3.0).unwrap();
        assert_abs_diff_eq!(d, PI.cbrt(), epsilon = 1e-3);
        // position: 4π ∫ r^3 · r^3 dr = 4π/7
        let pnorm = hardy_weighted_norm(&lin, HardyMode::Position, 3.0).unwrap();
        assert_abs_diff_eq!(pnorm, (4.0 * PI / 7.0).cbrt(), epsilon = 1e-3);
        assert!(hardy_weighted_norm(&lin, HardyMode::Position, 2.0).is_err());
    }

    #[test]
    fn utov_m2_identity_and_zero() {
        let g = RadialGrid::new(8.0, 32000).unwrap();
        let zero = SampledFunction::zeros(g);
        assert_eq!(utov_sides(&zero, 0.5, 3.0).unwrap(), (0.0, 0.0));
        let phi = SampledFunction::from_fn(g, |r| (1.0 + r).cos() * (-0.5 * r * r).exp());
        for radius in [0.0, 0.25, 1.0, 2.3] {
            let (l, r) = utov_sides(&phi, radius, 2.0).unwrap();
            assert!((l - r).abs() <= 1e-6 * l.max(r), "R={radius}: {l} vs {r}");
        }
        assert!(utov_sides(&phi, 8.0, 3.0).is_err());
    }

    #[test]
    fn utov_exponential_m3_ratio() {
        let g = RadialGrid::new(40.0, 20000).unwrap();
        let phi = SampledFunction::from_fn(g, |r| (-r).exp());
        let (l, r) = utov_sides(&phi, 1.0, 3.0).unwrap();
        // closed forms: lhs = ∫_1^∞ r³ e^{-3r} dr, rhs = ∫_1^∞ |1-r|³ e^{-3r} dr + e^{-3}
        let lhs = simpson(|r| r.powi(3) * (-3.0 * r).exp(), 1.0, 40.0, 200000);
        let rhs = simpson(|r| (1.0 - r).abs().powi(3) * (-3.0 * r).exp(), 1.0, 40.0, 200000)
            + (-3.0f64).exp();
        assert!((l - lhs).abs() <= 1e-5 * lhs);
        assert!((r - rhs).abs() <= 1e-5 * rhs);
        let k = l / r;
        assert!(k > 0.0 && k.is_finite());
    }

    #[test]
    fn sobolev_h1_matches_gradient_norm() {
        let g = RadialGrid::new(8.0, 2048).unwrap();
        let phi = SampledFunction::from_fn(g, |r| (-r * r).exp());
        let spec = sobolev_norm_radial(&phi, 1.0).unwrap();
        let oracle = (16.0 * PI * simpson(|r| r.powi(4) * (-2.0 * r * r).exp(), 0.0, 8.0, 20000)).sqrt();
        assert!((spec - oracle).abs() <= 0.01 * oracle, "{spec} vs {oracle}");
        // L² as well: ‖φ‖² = 4π ∫ r² e^{-2r²} dr
        let l2 = sobolev_norm_radial(&phi, 0.0).unwrap();
        let l2_oracle = (4.0 * PI * simpson(|r| r * r * (-2.0 * r * r).exp(), 0.0, 8.0, 20000)).sqrt();
        assert!((l2 - l2_oracle).abs() <= 1e-3 * l2_oracle);
    }

    #[test]
    fn sobolev_guards() {
        let g = RadialGrid::new(2.0, 128).unwrap();
        assert_eq!(sobolev_norm_radial(&SampledFunction::zeros(g), 1.1).unwrap(), 0.0);
        let slow = SampledFunction::from_fn(g, |r| 1.0 / (1.0 + r));
        assert!(matches!(
            sobolev_norm_radial(&slow, 1.0),
            Err(Error::DecayViolated { .. })
        ));
        assert!(matches!(sobolev_norm_radial(&slow, 1.5), Err(Error::SobolevOrder(_))));
    }

    #[test]
    fn critical_norm_is_scale_invariant() {
        let params = p7();
        let g = RadialGrid::new(24.0, 8192).unwrap();
        let base = |r: f64| (-r * r).exp();
        let sc = params.s_c();
        let n0 = sobolev_norm_radial(&SampledFunction::from_fn(g, base), sc).unwrap();
        for lambda in [0.5, 2.0, 4.0] {
            let (amp, _) = params.rescale_exponents(lambda).unwrap();
            let scaled = SampledFunction::from_fn(g, |r| amp * base(lambda * r));
            let nl = sobolev_norm_radial(&scaled, sc).unwrap();
            assert!((nl - n0).abs() <= 0.01 * n0, "λ={lambda}: {nl} vs {n0}");
        }
    }

    #[test]
    fn defocusing_potential_is_positive() {
        let params = Params::new(7.0, Sign::Defocusing).unwrap();
        let g = RadialGrid::new(6.0, 600).unwrap();
        let s = RadialState::from_fns(params, g, |r| 0.5 * (-r * r).exp(), |_| 0.0);
        let e = nonlinear_energy(&s).unwrap();
        assert!(e.potential > 0.0);
        let f = nonlinear_energy(&RadialState { params: p7(), ..s }).unwrap();
        assert!(f.potential < 0.0);
        assert_abs_diff_eq!(e.potential, -f.potential, epsilon = 1e-15);
        assert_abs_diff_eq!(e.total_nonlinear, e.e_2 + e.potential, epsilon = 1e-15);
    }
}
