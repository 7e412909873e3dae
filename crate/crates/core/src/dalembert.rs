//! Free radial waves through the one-dimensional profile.
//!
//! A radial solution of the free wave equation on ℝ³ satisfies
//! `r w(t,r) = f(t+r) - f(t-r)`. The profile stores `ḟ` and `f` on a uniform
//! line grid `s_j = j h`, `|j| <= N`, with `ḟ = 0` outside `[-L, L]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{
    cumulative_trapezoid, differentiate_values, divide_by_r, interp_linear, trapezoid_window,
    RadialGrid, RadialState, SampledFunction,
};
use crate::model::Params;

const WINDOW_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeWaveProfile {
    params: Params,
    h: f64,
    half_nodes: usize,
    fdot: Vec<f64>,
    f: Vec<f64>,
    f_zero_minus: f64,
    f_zero_plus: f64,
}

impl FreeWaveProfile {
    /// Profile from samples of `ḟ` at `s_j = (j - N) h`, `j = 0..=2N`;
    /// `f` is the cumulative trapezoid integral with `f(0) = 0`.
    pub fn from_fdot(params: Params, h: f64, fdot: Vec<f64>) -> Result<Self> {
        if fdot.len() < 9 || fdot.len().is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "profile needs an odd number (>= 9) of samples, got {}",
                fdot.len()
            )));
        }
        if !(h > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing h = {h}")));
        }
        if fdot.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("non-finite profile sample".into()));
        }
        let half_nodes = fdot.len() / 2;
        let right = cumulative_trapezoid(&fdot[half_nodes..], h);
        let left_rev: Vec<f64> = fdot[..=half_nodes].iter().rev().copied().collect();
        let left = cumulative_trapezoid(&left_rev, h);
        let mut f = vec![0.0; fdot.len()];
        for (k, v) in right.iter().enumerate() {
            f[half_nodes + k] = *v;
        }
        for (k, v) in left.iter().enumerate() {
            f[half_nodes - k] = -v;
        }
        Ok(Self {
            params,
            h,
            half_nodes,
            fdot,
            f,
            f_zero_minus: 0.0,
            f_zero_plus: 0.0,
        })
    }

    /// Samples `ḟ(s)` from a closure on `[-L, L]` with spacing `h`.
    pub fn from_fn(params: Params, h: f64, half_width: f64, fdot: impl Fn(f64) -> f64) -> Result<Self> {
        let half_nodes = (half_width / h - WINDOW_TOL).ceil().max(4.0) as usize;
        let samples = (0..=2 * half_nodes)
            .map(|j| fdot((j as f64 - half_nodes as f64) * h))
            .collect();
        Self::from_fdot(params, h, samples)
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Half-width `L` of the stored window.
    pub fn half_width(&self) -> f64 {
        self.half_nodes as f64 * self.h
    }

    pub fn fdot_samples(&self) -> &[f64] {
        &self.fdot
    }

    pub fn f_samples(&self) -> &[f64] {
        &self.f
    }

    /// One-sided limits `(f(0⁻), f(0⁺))`.
    pub fn f_at_zero(&self) -> (f64, f64) {
        (self.f_zero_minus, self.f_zero_plus)
    }

    pub fn node(&self, j: usize) -> f64 {
        (j as f64 - self.half_nodes as f64) * self.h
    }

    fn x0(&self) -> f64 {
        -self.half_width()
    }

    /// `ḟ(s)`, zero outside the window.
    pub fn fdot_at(&self, s: f64) -> f64 {
        interp_linear(&self.fdot, self.x0(), self.h, s).unwrap_or(0.0)
    }

    /// `f(s)`, extended by its end values outside the window.
    pub fn f_at(&self, s: f64) -> f64 {
        match interp_linear(&self.f, self.x0(), self.h, s) {
            Some(v) => v,
            None if s < 0.0 => self.f[0],
            None => self.f[self.f.len() - 1],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.fdot.iter().all(|&v| v == 0.0)
    }

    /// `∫_a^b |ḟ|^m ds` for `-L <= a <= b <= L`.
    pub fn profile_mass(&self, m: f64, a: f64, b: f64) -> Result<f64> {
        let l = self.half_width();
        let tol = WINDOW_TOL * l.max(1.0);
        if a > b || a < -l - tol || b > l + tol {
            return Err(Error::BadInterval { a, b, lo: -l, hi: l });
        }
        Ok(self.mass_clipped(m, a, b))
    }

    fn mass_clipped(&self, m: f64, a: f64, b: f64) -> f64 {
        let pow: Vec<f64> = self.fdot.iter().map(|v| v.abs().powf(m)).collect();
        trapezoid_window(&pow, self.x0(), self.h, a, b)
    }

    /// Left and right exterior masses `M₋ = ∫_{-∞}^{-R} |ḟ|^m`,
    /// `M₊ = ∫_R^∞ |ḟ|^m`.
    pub fn split_masses(&self, m: f64, radius: f64) -> Result<(f64, f64)> {
        if radius < 0.0 {
            return Err(Error::NegativeRadius(radius));
        }
        let l = self.half_width();
        Ok((
            self.mass_clipped(m, -l, -radius),
            self.mass_clipped(m, radius, l),
        ))
    }

    /// Which time directions carry the half-mass lower bound for the
    /// exterior surrogate: `(t >= 0, t <= 0)`.
    pub fn certified_directions(&self, m: f64, radius: f64) -> Result<(bool, bool)> {
        let (minus, plus) = self.split_masses(m, radius)?;
        Ok((minus >= plus, minus <= plus))
    }

    /// Exterior surrogate
    /// `Ẽ_{m,R}(t) = ∫_{R+|t|}^∞ |ḟ(t+r)|^m + |ḟ(t-r)|^m dr` in closed form.
    pub fn exterior_surrogate(&self, m: f64, radius: f64, t: f64) -> Result<f64> {
        if radius < 0.0 {
            return Err(Error::NegativeRadius(radius));
        }
        let l = self.half_width();
        Ok(if t >= 0.0 {
            self.mass_clipped(m, -l, -radius) + self.mass_clipped(m, radius + 2.0 * t, l)
        } else {
            self.mass_clipped(m, radius, l) + self.mass_clipped(m, -l, 2.0 * t - radius)
        })
    }

    /// `∫_0^∞ |ḟ(t+r)|^m + |ḟ(t-r)|^m dr` by trapezoid quadrature in `r`
    /// (spacing `h`). Independent of `t` up to quadrature error.
    pub fn full_line_surrogate(&self, m: f64, t: f64) -> f64 {
        let reach = self.half_width() + t.abs();
        let n = (reach / self.h).ceil() as usize + 1;
        let g = |k: usize| {
            let r = k as f64 * self.h;
            self.fdot_at(t + r).abs().powf(m) + self.fdot_at(t - r).abs().powf(m)
        };
        let mut sum = 0.5 * g(0);
        for k in 1..n {
            sum += g(k);
        }
        sum += 0.5 * g(n);
        sum * self.h
    }

    /// `∫_0^{r_max} |ḟ(t+r)+ḟ(t-r)|^m + |ḟ(t+r)-ḟ(t-r)|^m dr` on `grid`.
    pub fn generalized_energy_from_profile(&self, m: f64, t: f64, grid: &RadialGrid) -> f64 {
        let vals: Vec<f64> = grid
            .nodes()
            .map(|r| {
                let a = self.fdot_at(t + r);
                let b = self.fdot_at(t - r);
                (a + b).abs().powf(m) + (a - b).abs().powf(m)
            })
            .collect();
        trapezoid_window(&vals, 0.0, grid.h(), 0.0, grid.r_max())
    }

    /// Exact reduced derivatives `(∂_r(rw), ∂_t(rw))` at time `t` on `grid`.
    pub fn reduced_derivatives(&self, t: f64, grid: &RadialGrid) -> (Vec<f64>, Vec<f64>) {
        grid.nodes()
            .map(|r| {
                let a = self.fdot_at(t + r);
                let b = self.fdot_at(t - r);
                (a + b, a - b)
            })
            .unzip()
    }

    /// Evaluate the free wave at time `t` on `grid`.
    pub fn eval_linear(&self, t: f64, grid: &RadialGrid) -> Result<RadialState> {
        let l = self.half_width();
        let need = t.abs() + grid.r_max();
        if need > l * (1.0 + WINDOW_TOL) + WINDOW_TOL {
            return Err(Error::CausalWindowExceeded { need, l });
        }
        let mut v = Vec::with_capacity(grid.len());
        let mut vt = Vec::with_capacity(grid.len());
        for r in grid.nodes() {
            v.push(self.f_at(t + r) - self.f_at(t - r));
            vt.push(self.fdot_at(t + r) - self.fdot_at(t - r));
        }
        v[0] = 0.0;
        vt[0] = 0.0;
        let w = divide_by_r(grid, &v);
        let wt = divide_by_r(grid, &vt);
        Ok(RadialState {
            params: self.params,
            w: SampledFunction::from_parts_unchecked(*grid, w),
            wt: SampledFunction::from_parts_unchecked(*grid, wt),
            time: t,
        })
    }
}

/// Build the profile of the free wave with data `(w₀, w₁)` at `t = 0`:
/// `ḟ(±r) = ½(∂_r(r w₀)(r) ± r w₁(r))`, and `f` from the piecewise formula
/// `f(s) = ½ s w₀(|s|) + ½ ∫_0^{|s|} σ w₁(σ) dσ`.
pub fn build_free_profile(data: &RadialState, half_width: f64) -> Result<FreeWaveProfile> {
    let grid = *data.grid();
    if half_width < grid.r_max() * (1.0 - WINDOW_TOL) {
        return Err(Error::DomainTooSmall {
            l: half_width,
            r_max: grid.r_max(),
        });
    }
    if !data.is_finite() {
        return Err(Error::InvalidGrid("non-finite data".into()));
    }
    let h = grid.h();
    let n = grid.n();
    let half_nodes = ((half_width / h) - WINDOW_TOL).ceil().max(n as f64) as usize;
    let v0 = data.v();
    let rw1 = data.vt();
    let dv0 = differentiate_values(v0.values(), h)?;
    let moment = cumulative_trapezoid(rw1.values(), h);
    let w0 = data.w.values();

    let len = 2 * half_nodes + 1;
    let mut fdot = vec![0.0; len];
    let mut f = vec![0.5 * moment[n]; len];
    for k in 0..=n {
        let r = grid.r(k);
        fdot[half_nodes + k] = 0.5 * (dv0[k] + rw1.values()[k]);
        fdot[half_nodes - k] = 0.5 * (dv0[k] - rw1.values()[k]);
        f[half_nodes + k] = 0.5 * r * w0[k] + 0.5 * moment[k];
        f[half_nodes - k] = -0.5 * r * w0[k] + 0.5 * moment[k];
    }
    Ok(FreeWaveProfile {
        params: data.params,
        h,
        half_nodes,
        fdot,
        f,
        f_zero_minus: 0.0,
        f_zero_plus: 0.0,
    })
}

pub fn eval_linear(profile: &FreeWaveProfile, t: f64, grid: &RadialGrid) -> Result<RadialState> {
    profile.eval_linear(t, grid)
}

pub fn profile_mass(profile: &FreeWaveProfile, m: f64, a: f64, b: f64) -> Result<f64> {
    profile.profile_mass(m, a, b)
}

pub fn exterior_surrogate(profile: &FreeWaveProfile, m: f64, radius: f64, t: f64) -> Result<f64> {
    profile.exterior_surrogate(m, radius, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Sign;
    use approx::assert_abs_diff_eq;

    fn p7() -> Params {
        Params::new(7.0, Sign::Focusing).unwrap()
    }

    fn bump(r: f64, c: f64, w: f64) -> f64 {
        let x = (r - c) / w;
        if x.abs() < 1.0 {
            (-1.0 / (1.0 - x * x)).exp()
        } else {
            0.0
        }
    }

    #[test]
    fn zero_position_gives_odd_profile() {
        let g = RadialGrid::new(4.0, 400).unwrap();
        let data = RadialState::from_fns(p7(), g, |_| 0.0, |r| bump(r, 1.5, 1.0));
        let pr = build_free_profile(&data, 4.0).unwrap();
        let n = pr.fdot_samples().len();
        for j in 0..n {
            assert_abs_diff_eq!(pr.fdot_samples()[j], -pr.fdot_samples()[n - 1 - j], epsilon = 1e-15);
        }
        for (k, r) in g.nodes().enumerate() {
            assert_abs_diff_eq!(pr.fdot_at(r), 0.5 * r * data.wt.values()[k], epsilon = 1e-14);
        }
    }

    #[test]
    fn zero_velocity_gives_even_profile() {
        let g = RadialGrid::new(4.0, 400).unwrap();
        let data = RadialState::from_fns(p7(), g, |r| bump(r, 1.0, 0.8), |_| 0.0);
        let pr = build_free_profile(&data, 5.0).unwrap();
        let n = pr.fdot_samples().len();
        for j in 0..n {
            assert_eq!(pr.fdot_samples()[j], pr.fdot_samples()[n - 1 - j]);
        }
    }

    #[test]
    fn gaussian_profile_matches_closed_form() {
        let g = RadialGrid::new(4.0, 4000).unwrap();
        let data = RadialState::from_fns(p7(), g, |r| (-r * r).exp(), |_| 0.0);
        let pr = build_free_profile(&data, 4.0).unwrap();
        for r in g.nodes() {
            let exact = 0.5 * (1.0 - 2.0 * r * r) * (-r * r).exp();
            assert_abs_diff_eq!(pr.fdot_at(r), exact, epsilon = 1e-6);
            assert_abs_diff_eq!(pr.fdot_at(-r), exact, epsilon = 1e-6);
        }
    }

    #[test]
    fn domain_too_small() {
        let g = RadialGrid::new(4.0, 64).unwrap();
        let data = RadialState::zero(p7(), g);
        assert!(matches!(
            build_free_profile(&data, 3.0),
            Err(Error::DomainTooSmall { .. })
        ));
    }

    #[test]
    fn round_trip_at_t0() {
        let g = RadialGrid::new(4.0, 800).unwrap();
        let data = RadialState::from_fns(
            p7(),
            g,
            |r| (-r * r).exp() + 0.3 * bump(r, 2.0, 0.7),
            |r| bump(r, 1.2, 0.9),
        );
        let pr = build_free_profile(&data, 6.0).unwrap();
        let back = pr.eval_linear(0.0, &g).unwrap();
        let h = g.h();
        for i in 0..g.len() {
            assert_abs_diff_eq!(back.w.values()[i], data.w.values()[i], epsilon = 10.0 * h * h);
            assert_abs_diff_eq!(back.wt.values()[i], data.wt.values()[i], epsilon = 10.0 * h * h);
        }
    }

    #[test]
    fn zero_profile_stays_zero() {
        let g = RadialGrid::new(2.0, 64).unwrap();
        let pr = build_free_profile(&RadialState::zero(p7(), g), 10.0).unwrap();
        assert!(pr.is_zero());
        for t in [-3.0, 0.0, 1.5, 8.0] {
            let s = pr.eval_linear(t, &g).unwrap();
            assert!(s.w.values().iter().chain(s.wt.values()).all(|&v| v == 0.0));
        }
        assert_eq!(pr.profile_mass(3.0, -10.0, 10.0).unwrap(), 0.0);
    }

    #[test]
    fn strong_huygens_interior_vanishes() {
        let g = RadialGrid::new(12.0, 1200).unwrap();
        let supp = 2.0;
        let data = RadialState::from_fns(p7(), g, |r| bump(r, 1.0, 1.0), |r| bump(r, 1.2, 0.8));
        let pr = build_free_profile(&data, 22.0).unwrap();
        let t = 8.0;
        let s = pr.eval_linear(t, &g).unwrap();
        for (i, r) in g.nodes().enumerate() {
            // the finite-difference stencil widens the profile support by one node
            if r <= t - supp - 2.0 * g.h() {
                assert_eq!(s.w.values()[i], 0.0, "r = {r}");
                assert_eq!(s.wt.values()[i], 0.0, "r = {r}");
            }
        }
    }

    #[test]
    fn causal_window_enforced() {
        let g = RadialGrid::new(2.0, 64).unwrap();
        let pr = build_free_profile(&RadialState::zero(p7(), g), 5.0).unwrap();
        assert!(pr.eval_linear(3.0, &g).is_ok());
        assert!(matches!(
            pr.eval_linear(3.5, &g),
            Err(Error::CausalWindowExceeded { .. })
        ));
    }

    #[test]
    fn unit_plateau_mass() {
        let h = 1.0 / 64.0;
        let pr = FreeWaveProfile::from_fn(p7(), h, 4.0, |s| {
            if (0.0..=1.0).contains(&s) {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        // linear ramps of width h at both plateau edges contribute h/2 each
        assert_abs_diff_eq!(pr.profile_mass(3.0, -4.0, 4.0).unwrap(), 1.0 + h, epsilon = 1e-12);
        assert!(pr.profile_mass(3.0, 1.0, 0.0).is_err());
        assert!(pr.profile_mass(3.0, -5.0, 0.0).is_err());
    }

    #[test]
    fn surrogate_split_at_zero_time() {
        let h = 1.0 / 128.0;
        let pr = FreeWaveProfile::from_fn(p7(), h, 6.0, |s| (s - 0.7).sin() * (-s * s).exp()).unwrap();
        for radius in [0.0, 0.3, 1.0, 2.5] {
            let l = pr.half_width();
            let split = pr.profile_mass(3.0, -l, -radius).unwrap() + pr.profile_mass(3.0, radius, l).unwrap();
            let fwd = pr.exterior_surrogate(3.0, radius, 0.0).unwrap();
            let bwd = pr.exterior_surrogate(3.0, radius, -0.0).unwrap();
            assert_abs_diff_eq!(fwd, split, epsilon = 1e-15);
            assert_abs_diff_eq!(bwd, split, epsilon = 1e-15);
        }
        assert_eq!(pr.exterior_surrogate(3.0, -1.0, 0.0), Err(Error::NegativeRadius(-1.0)));
    }

    #[test]
    fn left_supported_profile_keeps_left_mass() {
        let h = 1.0 / 256.0;
        let pr = FreeWaveProfile::from_fn(p7(), h, 16.0, |s| bump(s, -1.5, 0.5)).unwrap();
        let left = pr.profile_mass(3.0, -16.0, -0.5).unwrap();
        assert!(left > 0.0);
        let e10 = pr.exterior_surrogate(3.0, 0.5, 10.0).unwrap();
        assert_abs_diff_eq!(e10, left, epsilon = 1e-15);
        let (fwd, bwd) = pr.certified_directions(3.0, 0.5).unwrap();
        assert!(fwd && !bwd);
    }

    #[test]
    fn surrogate_nonincreasing_forward() {
        let h = 1.0 / 128.0;
        let pr = FreeWaveProfile::from_fn(p7(), h, 12.0, |s| bump(s, 1.0, 2.5) - 0.5 * bump(s, -2.0, 1.0)).unwrap();
        let mut prev = f64::INFINITY;
        for k in 0..60 {
            let e = pr.exterior_surrogate(3.0, 0.5, k as f64 * 0.1).unwrap();
            assert!(e <= prev + 1e-15);
            prev = e;
        }
    }

    #[test]
    fn full_line_surrogate_is_time_independent() {
        let h = 1.0 / 128.0;
        let pr = FreeWaveProfile::from_fn(p7(), h, 8.0, |s| (2.0 * s).cos() * (-s * s).exp()).unwrap();
        let total = pr.profile_mass(3.0, -8.0, 8.0).unwrap();
        for t in [0.0, 1.0, -2.0, 5.0] {
            let v = pr.full_line_surrogate(3.0, t);
            assert!((v - total).abs() <= 1e-12 * total, "t = {t}: {v} vs {total}");
        }
        // off-grid times pick up interpolation error of order h²
        let v = pr.full_line_surrogate(3.0, 0.37);
        assert!((v - total).abs() <= 1e-3 * total);
    }
}
