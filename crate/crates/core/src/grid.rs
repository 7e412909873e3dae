//! Uniform radial grids, finite differences and trapezoid quadrature.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Params;

pub const MIN_NODES: usize = 16;

/// Uniform grid `r_i = i h`, `i = 0..=n`, `h = r_max / n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    r_max: f64,
    n: usize,
    h: f64,
}

impl RadialGrid {
    pub fn new(r_max: f64, n: usize) -> Result<Self> {
        if n < MIN_NODES {
            return Err(Error::GridTooSmall(n, MIN_NODES));
        }
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::InvalidGrid(format!("r_max = {r_max}")));
        }
        Ok(Self {
            r_max,
            n,
            h: r_max / n as f64,
        })
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Number of intervals; there are `n + 1` nodes.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn r(&self, i: usize) -> f64 {
        if i == self.n {
            self.r_max
        } else {
            i as f64 * self.h
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(move |i| self.r(i))
    }

    /// Index of the first node with `r_i >= r` (clamped to the grid).
    pub fn index_at_or_above(&self, r: f64) -> usize {
        let x = (r / self.h).ceil();
        if x <= 0.0 {
            0
        } else {
            (x as usize).min(self.n)
        }
    }
}

/// Samples of a radial function on a [`RadialGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    grid: RadialGrid,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite value at node {i}")));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: RadialGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().map(f).collect();
        Self { grid, values }
    }

    pub fn zeros(grid: RadialGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub(crate) fn from_parts_unchecked(grid: RadialGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| f(self.grid.r(i), v))
            .collect();
        Self {
            grid: self.grid,
            values,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Linear interpolation at `r ∈ [0, r_max]`.
    pub fn interpolate(&self, r: f64) -> f64 {
        interp_linear(&self.values, 0.0, self.grid.h, r).unwrap_or(0.0)
    }

    /// Values of `r f(r)`.
    pub fn times_r(&self) -> Self {
        self.map(|r, v| r * v)
    }
}

/// Second-order finite-difference derivative: centered in the interior,
/// one-sided three-point stencils at both ends.
pub fn differentiate(f: &SampledFunction) -> Result<SampledFunction> {
    let d = differentiate_values(&f.values, f.grid.h)?;
    Ok(SampledFunction::from_parts_unchecked(f.grid, d))
}

pub(crate) fn differentiate_values(v: &[f64], h: f64) -> Result<Vec<f64>> {
    let len = v.len();
    if len < 5 {
        return Err(Error::GridTooSmall(len.saturating_sub(1), 4));
    }
    let inv2h = 0.5 / h;
    let mut d = vec![0.0; len];
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) * inv2h;
    for i in 1..len - 1 {
        d[i] = (v[i + 1] - v[i - 1]) * inv2h;
    }
    d[len - 1] = (3.0 * v[len - 1] - 4.0 * v[len - 2] + v[len - 3]) * inv2h;
    Ok(d)
}

/// Cumulative trapezoid `F(r_i) = ∫_0^{r_i} f`.
pub fn antiderivative(f: &SampledFunction) -> SampledFunction {
    SampledFunction::from_parts_unchecked(f.grid, cumulative_trapezoid(&f.values, f.grid.h))
}

pub(crate) fn cumulative_trapezoid(v: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(v.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in v.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Composite trapezoid approximation of `∫_a^b |f|^m dr`.
///
/// Off-grid endpoints use linear interpolation of `|f|^m`.
pub fn integrate_power(f: &SampledFunction, m: f64, a: f64, b: f64) -> Result<f64> {
    let g = f.grid;
    if !(a >= 0.0) || a > b || b > g.r_max * (1.0 + 1e-14) {
        return Err(Error::BadInterval {
            a,
            b,
            lo: 0.0,
            hi: g.r_max,
        });
    }
    let pow: Vec<f64> = f.values.iter().map(|v| v.abs().powf(m)).collect();
    Ok(trapezoid_window(&pow, 0.0, g.h, a, b.min(g.r_max)))
}

/// Trapezoid integral of the piecewise-linear interpolant of `g` (nodes at
/// `x0 + i h`) over `[a, b]`, clipped to the node range.
pub(crate) fn trapezoid_window(g: &[f64], x0: f64, h: f64, a: f64, b: f64) -> f64 {
    let last = g.len() - 1;
    let lo = x0;
    let hi = x0 + last as f64 * h;
    let a = a.max(lo);
    let b = b.min(hi);
    if !(b > a) {
        return 0.0;
    }
    let pa = (a - x0) / h;
    let pb = (b - x0) / h;
    let ia = (pa.floor() as usize).min(last - 1);
    let ib = (pb.floor() as usize).min(last - 1);
    let at = |i: usize, frac: f64| g[i] + (g[i + 1] - g[i]) * frac;
    let fa = (pa - ia as f64).clamp(0.0, 1.0);
    let fb = (pb - ib as f64).clamp(0.0, 1.0);
    if ia == ib {
        let ga = at(ia, fa);
        let gb = at(ib, fb);
        return 0.5 * (ga + gb) * (fb - fa) * h;
    }
    let ga = at(ia, fa);
    let mut sum = 0.5 * (ga + g[ia + 1]) * (1.0 - fa) * h;
    for i in ia + 1..ib {
        sum += 0.5 * (g[i] + g[i + 1]) * h;
    }
    let gb = at(ib, fb);
    sum += 0.5 * (g[ib] + gb) * fb * h;
    sum
}

/// Linear interpolation on nodes `x0 + i h`; `None` outside the node range.
pub(crate) fn interp_linear(v: &[f64], x0: f64, h: f64, x: f64) -> Option<f64> {
    let last = v.len() - 1;
    let p = (x - x0) / h;
    let tol = 1e-9;
    if p < -tol || p > last as f64 + tol {
        return None;
    }
    let p = p.clamp(0.0, last as f64);
    let i = (p.floor() as usize).min(last - 1);
    let frac = p - i as f64;
    if frac == 0.0 {
        return Some(v[i]);
    }
    if frac == 1.0 {
        return Some(v[i + 1]);
    }
    Some(v[i] + (v[i + 1] - v[i]) * frac)
}

/// Sampled pair `(w(t,·), ∂_t w(t,·))` together with its exponent bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialState {
    pub params: Params,
    pub w: SampledFunction,
    pub wt: SampledFunction,
    pub time: f64,
}

impl RadialState {
    pub fn new(params: Params, w: SampledFunction, wt: SampledFunction, time: f64) -> Result<Self> {
        if w.grid != wt.grid {
            return Err(Error::InvalidGrid("w and wt on different grids".into()));
        }
        Ok(Self {
            params,
            w,
            wt,
            time,
        })
    }

    pub fn from_fns(
        params: Params,
        grid: RadialGrid,
        w0: impl Fn(f64) -> f64,
        w1: impl Fn(f64) -> f64,
    ) -> Self {
        Self {
            params,
            w: SampledFunction::from_fn(grid, w0),
            wt: SampledFunction::from_fn(grid, w1),
            time: 0.0,
        }
    }

    pub fn zero(params: Params, grid: RadialGrid) -> Self {
        Self::from_fns(params, grid, |_| 0.0, |_| 0.0)
    }

    pub fn grid(&self) -> &RadialGrid {
        self.w.grid()
    }

    /// Reduced field `v = r w`; `v(0) = 0` exactly.
    pub fn v(&self) -> SampledFunction {
        self.w.times_r()
    }

    /// `∂_t (r w)`.
    pub fn vt(&self) -> SampledFunction {
        self.wt.times_r()
    }

    pub fn is_finite(&self) -> bool {
        self.w.values.iter().chain(&self.wt.values).all(|v| v.is_finite())
    }

    /// Largest radius where `|w|` or `|w_t|` exceeds `rel_tol` times the
    /// overall maximum; zero data have support radius 0.
    pub fn support_radius(&self, rel_tol: f64) -> f64 {
        let scale = self.w.max_abs().max(self.wt.max_abs());
        if scale == 0.0 {
            return 0.0;
        }
        let thr = rel_tol * scale;
        let g = self.grid();
        (0..=g.n())
            .rev()
            .find(|&i| self.w.values[i].abs() > thr || self.wt.values[i].abs() > thr)
            .map(|i| g.r(i))
            .unwrap_or(0.0)
    }
}

/// Recover `w = v / r` from the reduced field, extrapolating the origin
/// value quadratically through nodes 1..3.
pub(crate) fn divide_by_r(grid: &RadialGrid, v: &[f64]) -> Vec<f64> {
    let mut w: Vec<f64> = v
        .iter()
        .enumerate()
        .map(|(i, &vi)| if i == 0 { 0.0 } else { vi / grid.r(i) })
        .collect();
    w[0] = 3.0 * w[1] - 3.0 * w[2] + w[3];
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn grid_rejects_small_n() {
        assert_eq!(RadialGrid::new(1.0, 8), Err(Error::GridTooSmall(8, 16)));
        assert!(RadialGrid::new(0.0, 100).is_err());
    }

    #[test]
    fn derivative_exact_for_quadratics() {
        let g = RadialGrid::new(1.0, 100).unwrap();
        let f = SampledFunction::from_fn(g, |r| r * r);
        let d = differentiate(&f).unwrap();
        assert_abs_diff_eq!(d.values()[50], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(d.values()[0], 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(d.values()[100], 2.0, epsilon = 1e-10);
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let g = RadialGrid::new(3.0, 64).unwrap();
        let f = SampledFunction::from_fn(g, |_| 2.5);
        assert!(differentiate(&f).unwrap().values().iter().all(|&d| d == 0.0));
    }

    #[test]
    fn derivative_of_sine_second_order() {
        let n = 1000;
        let g = RadialGrid::new(std::f64::consts::PI, n).unwrap();
        let f = SampledFunction::from_fn(g, f64::sin);
        let d = differentiate(&f).unwrap();
        let err = g
            .nodes()
            .zip(d.values())
            .map(|(r, v)| (v - r.cos()).abs())
            .fold(0.0, f64::max);
        let bound = 5.0 * (std::f64::consts::PI / n as f64).powi(2);
        assert!(err <= bound, "{err} > {bound}");
    }

    #[test]
    fn differentiate_rejects_tiny_arrays() {
        assert!(differentiate_values(&[1.0, 2.0, 3.0], 0.1).is_err());
    }

    #[test]
    fn integrate_power_examples() {
        let g = RadialGrid::new(2.0, 64).unwrap();
        let one = SampledFunction::from_fn(g, |_| 1.0);
        assert_abs_diff_eq!(integrate_power(&one, 3.0, 0.0, 2.0).unwrap(), 2.0, epsilon = 1e-14);

        let g = RadialGrid::new(1.0, 1000).unwrap();
        let lin = SampledFunction::from_fn(g, |r| r);
        assert_abs_diff_eq!(integrate_power(&lin, 3.0, 0.0, 1.0).unwrap(), 0.25, epsilon = 1e-4);

        let g = RadialGrid::new(10.0, 4000).unwrap();
        let e = SampledFunction::from_fn(g, |r| (-r).exp());
        let exact = (1.0 - (-20.0f64).exp()) / 2.0;
        // leading trapezoid error h²/12 · (g'(10) - g'(0)) ≈ 1.04e-6 at this n
        assert_abs_diff_eq!(integrate_power(&e, 2.0, 0.0, 10.0).unwrap(), exact, epsilon = 1.1e-6);
    }

    #[test]
    fn integrate_power_off_grid_endpoints() {
        let g = RadialGrid::new(1.0, 16).unwrap();
        let one = SampledFunction::from_fn(g, |_| 1.0);
        assert_abs_diff_eq!(
            integrate_power(&one, 2.0, 0.013, 0.71).unwrap(),
            0.71 - 0.013,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            integrate_power(&one, 2.0, 0.3, 0.31).unwrap(),
            0.01,
            epsilon = 1e-14
        );
        let lin = SampledFunction::from_fn(g, |r| r);
        // |f|^1 is linear, so the interpolant is exact
        assert_abs_diff_eq!(
            integrate_power(&lin, 1.0, 0.1, 0.9).unwrap(),
            0.4,
            epsilon = 1e-14
        );
    }

    #[test]
    fn integrate_power_bad_interval() {
        let g = RadialGrid::new(1.0, 16).unwrap();
        let f = SampledFunction::zeros(g);
        assert!(matches!(
            integrate_power(&f, 2.0, 0.5, 0.4),
            Err(Error::BadInterval { .. })
        ));
        assert!(integrate_power(&f, 2.0, 0.0, 1.5).is_err());
    }

    #[test]
    fn divide_by_r_extrapolates_origin() {
        let g = RadialGrid::new(1.0, 100).unwrap();
        let v: Vec<f64> = g.nodes().map(|r| r * (1.0 + r * r)).collect();
        let w = divide_by_r(&g, &v);
        assert_abs_diff_eq!(w[0], 1.0, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn integrate_power_monotone_in_interval(
            coeffs in proptest::collection::vec(-2.0f64..2.0, 4),
            m in 1.0f64..5.0,
            a in 0.0f64..1.0, da in 0.0f64..1.0,
            b in 1.0f64..2.0, db in 0.0f64..1.0,
        ) {
            let g = RadialGrid::new(3.0, 97).unwrap();
            let f = SampledFunction::from_fn(g, |r| {
                coeffs[0] + coeffs[1] * r.sin() + coeffs[2] * (2.0 * r).cos() + coeffs[3] * r
            });
            let inner = integrate_power(&f, m, a, b).unwrap();
            let outer = integrate_power(&f, m, a * (1.0 - da), b + db).unwrap();
            prop_assert!(inner <= outer * (1.0 + 1e-12) + 1e-300);
        }

        #[test]
        fn derivative_of_antiderivative_recovers_f(k in 0.5f64..3.0, phase in 0.0f64..6.0) {
            let errs: Vec<f64> = [200usize, 400].iter().map(|&n| {
                let g = RadialGrid::new(2.0, n).unwrap();
                let f = SampledFunction::from_fn(g, |r| (k * r + phase).sin());
                let back = differentiate(&antiderivative(&f)).unwrap();
                back.values().iter().zip(f.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
            }).collect();
            // O(h^2): halving h cuts the error roughly by four
            prop_assert!(errs[0] < 0.05 * k * k * 0.01 * 4.0 + 1e-12);
            prop_assert!(errs[1] <= errs[0] / 3.0 + 1e-13);
        }
    }
}
