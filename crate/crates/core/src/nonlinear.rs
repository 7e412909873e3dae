//! Leapfrog evolution of the reduced field `v = r w`, which satisfies
//! `v_tt - v_rr = ι |v|^{p-1} v / r^{p-1}` with `v(t, 0) = 0`.
//!
//! At `Δt = h` the linear update `v^{k+1}_i = v^k_{i+1} + v^k_{i-1} - v^{k-1}_i`
//! is the exact d'Alembert recursion, and the stencil's domain of dependence
//! coincides with the light cone.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{divide_by_r, RadialGrid, RadialState, SampledFunction};
use crate::model::Params;

/// Relative level below which data count as zero when locating the support.
pub const SUPPORT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub dt_ratio: f64,
    pub t_end: f64,
    pub blowup_threshold: f64,
    pub record_stride: usize,
    /// Set to `false` to evolve the free wave equation with the same scheme.
    #[serde(default = "default_true")]
    pub nonlinear: bool,
}

fn default_true() -> bool {
    true
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt_ratio: 1.0,
            t_end: 1.0,
            blowup_threshold: 1e6,
            record_stride: 1,
            nonlinear: true,
        }
    }
}

impl SolverConfig {
    pub fn linear(self) -> Self {
        Self { nonlinear: false, ..self }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt_ratio > 0.0) || self.dt_ratio > 1.0 {
            return Err(Error::CflViolation(self.dt_ratio));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::InvalidConfig(format!("t_end = {}", self.t_end)));
        }
        if !(self.blowup_threshold > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "blowup_threshold = {}",
                self.blowup_threshold
            )));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidConfig("record_stride must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    BlewUp { t_star: f64 },
    Unstable { t: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub params: Params,
    pub dt: f64,
    pub states: Vec<RadialState>,
    pub status: RunStatus,
}

impl Trajectory {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.states.iter().map(|s| s.time)
    }
}

/// View of the solver state after each completed step.
pub struct StepView<'a> {
    pub step: usize,
    pub time: f64,
    pub v: &'a [f64],
    /// Centered `∂_t v` at `time`.
    pub vt: &'a [f64],
}

/// Reduced nonlinearity `ι |v|^{p-1} v / r^{p-1}`, zero at the origin.
#[inline]
pub fn nonlinearity(v: f64, r: f64, params: &Params) -> f64 {
    if r <= 0.0 || v == 0.0 {
        return 0.0;
    }
    let w = v / r;
    params.iota_value() * r * w.abs().powf(params.p() - 1.0) * w
}

fn max_abs_w(grid: &RadialGrid, v: &[f64]) -> f64 {
    let mut m = 0.0f64;
    for (i, vi) in v.iter().enumerate().skip(1) {
        m = m.max((vi / grid.r(i)).abs());
    }
    let w0 = 3.0 * v[1] / grid.r(1) - 3.0 * v[2] / grid.r(2) + v[3] / grid.r(3);
    m.max(w0.abs())
}

fn state_from_v(params: Params, grid: &RadialGrid, v: &[f64], vt: &[f64], time: f64) -> RadialState {
    RadialState {
        params,
        w: SampledFunction::from_parts_unchecked(*grid, divide_by_r(grid, v)),
        wt: SampledFunction::from_parts_unchecked(*grid, divide_by_r(grid, vt)),
        time,
    }
}

/// Evolve and record snapshots every `record_stride` steps.
pub fn evolve(initial: &RadialState, config: &SolverConfig) -> Result<Trajectory> {
    evolve_observed(initial, config, |_| {})
}

/// Like [`evolve`], also handing every step to `observer`.
pub fn evolve_observed(
    initial: &RadialState,
    config: &SolverConfig,
    mut observer: impl FnMut(&StepView<'_>),
) -> Result<Trajectory> {
    config.validate()?;
    let grid = *initial.grid();
    let params = initial.params;
    if !initial.is_finite() {
        return Err(Error::PreconditionViolated("non-finite initial data".into()));
    }
    let support = initial.support_radius(SUPPORT_TOLERANCE);
    if support > 0.0 && support + config.t_end > grid.r_max() {
        return Err(Error::CausalClosureViolated {
            support,
            t_end: config.t_end,
            r_max: grid.r_max(),
        });
    }

    let n = grid.n();
    let h = grid.h();
    let dt = config.dt_ratio * h;
    let steps = {
        let k = config.t_end / dt;
        if (k - k.round()).abs() < 1e-9 {
            k.round() as usize
        } else {
            k.ceil() as usize
        }
    };
    let lam2 = (dt / h).powi(2);
    let dt2 = dt * dt;
    let nl = |v: f64, i: usize| {
        if config.nonlinear {
            nonlinearity(v, grid.r(i), &params)
        } else {
            0.0
        }
    };

    let mut v_prev: Vec<f64> = initial.v().into_values();
    v_prev[0] = 0.0;
    let vt0: Vec<f64> = initial.vt().into_values();
    let boundary = v_prev[n];

    // Start: v¹ = v⁰ + Δt S + ½Δt²(v_rr + N) with S the velocity averaged as
    // v_t + (λ²/4) δ²v_t, which is the trapezoid rule for ∫ v_t at λ = 1.
    let mut v_cur = vec![0.0; n + 1];
    for i in 1..n {
        let lap = v_prev[i + 1] - 2.0 * v_prev[i] + v_prev[i - 1];
        let dvt = vt0[i + 1] - 2.0 * vt0[i] + vt0[i - 1];
        let avg_vt = vt0[i] + 0.25 * lam2 * dvt;
        v_cur[i] = v_prev[i] + dt * avg_vt + 0.5 * (lam2 * lap + dt2 * nl(v_prev[i], i));
    }
    v_cur[n] = boundary;

    let mut states = vec![RadialState { time: 0.0, ..initial.clone() }];
    let mut status = RunStatus::Completed;
    let mut v_next = vec![0.0; n + 1];
    let mut vt = vec![0.0; n + 1];

    observer(&StepView { step: 0, time: 0.0, v: &v_prev, vt: &vt0 });
    if steps == 0 {
        return Ok(Trajectory { params, dt, states, status });
    }
    if max_abs_w(&grid, &v_cur) > config.blowup_threshold {
        status = RunStatus::BlewUp { t_star: 0.0 };
        return Ok(Trajectory { params, dt, states, status });
    }

    // Loop invariant: v_prev = v^{k-1}, v_cur = v^k.
    for k in 1..=steps {
        for i in 1..n {
            let lap = v_cur[i + 1] - 2.0 * v_cur[i] + v_cur[i - 1];
            v_next[i] = 2.0 * v_cur[i] - v_prev[i] + lam2 * lap + dt2 * nl(v_cur[i], i);
        }
        v_next[0] = 0.0;
        v_next[n] = boundary;

        let t = k as f64 * dt;
        for i in 0..=n {
            vt[i] = (v_next[i] - v_prev[i]) / (2.0 * dt);
        }
        if v_cur.iter().any(|x| !x.is_finite()) {
            status = RunStatus::Unstable { t };
            break;
        }
        observer(&StepView { step: k, time: t, v: &v_cur, vt: &vt });
        if k % config.record_stride == 0 || k == steps {
            states.push(state_from_v(params, &grid, &v_cur, &vt, t));
        }
        if k == steps {
            break;
        }
        let next_max = max_abs_w(&grid, &v_next);
        if !next_max.is_finite() {
            status = RunStatus::Unstable { t: t + dt };
            break;
        }
        if next_max > config.blowup_threshold {
            status = RunStatus::BlewUp { t_star: t };
            break;
        }
        std::mem::swap(&mut v_prev, &mut v_cur);
        std::mem::swap(&mut v_cur, &mut v_next);
    }
    Ok(Trajectory { params, dt, states, status })
}

/// Blow-up time proxy: the time level from which the update that first
/// pushed `max|w|` past the threshold was taken (the last state below it).
pub fn detect_blowup(traj: &Trajectory) -> Option<f64> {
    match traj.status {
        RunStatus::BlewUp { t_star } => Some(t_star),
        _ => None,
    }
}

/// Evolve two data sets that agree on `r >= radius` and return the largest
/// `|w_a - w_b|` over snapshots and nodes with `r >= radius + t`.
pub fn check_finite_speed(
    data_a: &RadialState,
    data_b: &RadialState,
    radius: f64,
    config: &SolverConfig,
) -> Result<f64> {
    let grid = *data_a.grid();
    if *data_b.grid() != grid {
        return Err(Error::PreconditionViolated("data on different grids".into()));
    }
    for (i, r) in grid.nodes().enumerate() {
        if r >= radius {
            let dw = (data_a.w.values()[i] - data_b.w.values()[i]).abs();
            let dwt = (data_a.wt.values()[i] - data_b.wt.values()[i]).abs();
            if dw > 1e-12 || dwt > 1e-12 {
                return Err(Error::PreconditionViolated(format!(
                    "data differ by {:e} at r = {r} >= R = {radius}",
                    dw.max(dwt)
                )));
            }
        }
    }
    let ta = evolve(data_a, config)?;
    let tb = evolve(data_b, config)?;
    let mut worst = 0.0f64;
    for (sa, sb) in ta.states.iter().zip(&tb.states) {
        let start = grid.index_at_or_above(radius + sa.time);
        for i in start..=grid.n() {
            if grid.r(i) >= radius + sa.time {
                worst = worst.max((sa.w.values()[i] - sb.w.values()[i]).abs());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Sign;
    use approx::assert_abs_diff_eq;

    fn p7(sign: Sign) -> Params {
        Params::new(7.0, sign).unwrap()
    }

    #[test]
    fn nonlinearity_examples() {
        let pr = p7(Sign::Focusing);
        assert_eq!(nonlinearity(0.0, 1.0, &pr), 0.0);
        assert_eq!(nonlinearity(1.0, 0.0, &pr), 0.0);
        assert_abs_diff_eq!(nonlinearity(2.0, 1.0, &pr), 128.0, epsilon = 1e-12);
        let w = -0.7;
        let r = 0.3;
        assert_abs_diff_eq!(nonlinearity(r * w, r, &pr), w.powi(7) * r, epsilon = 1e-15);
        let de = p7(Sign::Defocusing);
        assert_abs_diff_eq!(nonlinearity(2.0, 1.0, &de), -128.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_data_completes() {
        let g = RadialGrid::new(4.0, 128).unwrap();
        let s = RadialState::zero(p7(Sign::Focusing), g);
        let cfg = SolverConfig { t_end: 2.0, record_stride: 8, ..Default::default() };
        let tr = evolve(&s, &cfg).unwrap();
        assert_eq!(tr.status, RunStatus::Completed);
        assert_eq!(detect_blowup(&tr), None);
        assert!(tr.states.iter().all(|st| st.w.values().iter().all(|&v| v == 0.0)));
        assert_eq!(tr.states.last().unwrap().time, 2.0);
        let times: Vec<f64> = tr.times().collect();
        assert!(times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn config_errors() {
        let g = RadialGrid::new(4.0, 128).unwrap();
        let s = RadialState::from_fns(p7(Sign::Focusing), g, |r| (-r * r).exp(), |_| 0.0);
        let bad = SolverConfig { dt_ratio: 1.5, ..Default::default() };
        assert_eq!(evolve(&s, &bad).unwrap_err(), Error::CflViolation(1.5));
        let long = SolverConfig { t_end: 3.0, ..Default::default() };
        assert!(matches!(
            evolve(&s, &long),
            Err(Error::CausalClosureViolated { .. })
        ));
    }

    #[test]
    fn finite_speed_identical_data() {
        let g = RadialGrid::new(8.0, 256).unwrap();
        let s = RadialState::from_fns(p7(Sign::Defocusing), g, |r| 0.5 * (-4.0 * r * r).exp(), |_| 0.0);
        let cfg = SolverConfig { t_end: 3.0, record_stride: 4, ..Default::default() };
        assert_eq!(check_finite_speed(&s, &s, 1.0, &cfg).unwrap(), 0.0);
        let other = RadialState::from_fns(p7(Sign::Defocusing), g, |r| (-r * r).exp(), |_| 0.0);
        assert!(matches!(
            check_finite_speed(&s, &other, 1.0, &cfg),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn focusing_large_data_blows_up() {
        let g = RadialGrid::new(6.0, 1024).unwrap();
        let s = RadialState::from_fns(
            p7(Sign::Focusing),
            g,
            |r| if r < 2.5 { 2.0 * (1.0 - (r / 2.5).powi(2)).powi(3) } else { 0.0 },
            |_| 0.0,
        );
        let cfg = SolverConfig { t_end: 3.0, record_stride: 16, ..Default::default() };
        let tr = evolve(&s, &cfg).unwrap();
        let t_star = detect_blowup(&tr).expect("blow-up");
        assert!(t_star < 0.5);
    }
}
