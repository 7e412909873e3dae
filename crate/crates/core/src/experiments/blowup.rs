//! Focusing blow-up against the ODE `y'' = |y|^{p-1} y`.
//!
//! Plateau data are spatially constant near the origin, so inside the
//! backward light cone of the flat region the PDE solution *is* the ODE
//! solution with `y(0) = A`, `y'(0) = 0`. The run is compared with an
//! adaptive integration of that ODE, with its blow-up time (also obtained
//! independently by quadrature) and with the self-similar law
//! `y ≈ c_p (T − t)^{-2/(p−1)}`.

use serde::{Deserialize, Serialize};

use super::data::{DataSpec, GridSpec};
use super::linear_fit;
use super::report::{ExperimentOutput, ReportBuilder, Series};
use crate::error::{Error, Result};
use crate::model::{Params, Sign};
use crate::nonlinear::{evolve_observed, RunStatus, SolverConfig};
use crate::ode::{integrate_through_blowup, Tolerances};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BlowupConfig {
    pub grid: GridSpec,
    pub amplitudes: Vec<f64>,
    /// Radius of the flat part of the plateau.
    pub plateau_radius: f64,
    pub taper: f64,
    pub t_end: f64,
    pub blowup_threshold: f64,
    /// Node radius whose trace is compared with the ODE.
    pub trace_radius: f64,
    /// The trace is compared while the ODE value stays below this
    /// multiple of the amplitude.
    pub trace_growth_cap: f64,
    /// Window `[lo, hi]·A` of values used for the self-similar fit.
    pub fit_window: [f64; 2],
}

impl Default for BlowupConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec { r_max: 6.0, n: 6000 },
            amplitudes: vec![1.0],
            plateau_radius: 2.0,
            taper: 1.0,
            t_end: 1.5,
            blowup_threshold: 1e6,
            trace_radius: 0.1,
            trace_growth_cap: 2.0,
            fit_window: [3.0, 10.0],
        }
    }
}

/// `c_p` with `c_p^{p-1} = 2(p+1)/(p-1)²`.
pub fn selfsimilar_constant(p: f64) -> f64 {
    (2.0 * (p + 1.0) / (p - 1.0).powi(2)).powf(1.0 / (p - 1.0))
}

/// Blow-up time of `y'' = |y|^{p-1}y`, `y(0) = A > 0`, `y'(0) = 0`, by
/// quadrature of the energy relation `y'² = 2(y^{p+1} − A^{p+1})/(p+1)`.
///
/// With `y = A/x` and `x = 1 − u²` the integrand is smooth on `[0, 1]`;
/// composite Simpson with `panels` (even) intervals.
pub fn ode_blowup_time(p: f64, amplitude: f64, panels: usize) -> f64 {
    let q = p + 1.0;
    let integrand = |u: f64| {
        let x = 1.0 - u * u;
        // (1 − x^{p+1}) / u², continuous at u = 0 with value p + 1
        let ratio = if u == 0.0 { q } else { -(q * (-u * u).ln_1p()).exp_m1() / (u * u) };
        2.0 * x.powf(0.5 * (p - 3.0)) / ratio.sqrt()
    };
    let n = panels + panels % 2;
    let h = 1.0 / n as f64;
    let mut acc = integrand(0.0) + integrand(1.0);
    for k in 1..n {
        acc += if k % 2 == 1 { 4.0 } else { 2.0 } * integrand(k as f64 * h);
    }
    (q / 2.0).sqrt() * amplitude.powf(-0.5 * (p - 1.0)) * acc * h / 3.0
}

/// Values of the ODE solution at `times` (only those before blow-up) and
/// the blow-up time found by continuation.
pub fn ode_oracle(p: f64, amplitude: f64, times: &[f64], x_end: f64) -> (Vec<(f64, f64)>, Option<f64>) {
    let g = |_x: f64, y: f64| y.abs().powf(p - 1.0) * y;
    let tol = Tolerances { rtol: 1e-12, atol: 1e-14, ..Default::default() };
    let tr = integrate_through_blowup(g, 0.0, amplitude, 0.0, x_end, 1e12, 10.0 * amplitude.max(1.0), p, &tol, times);
    (tr.outputs.iter().map(|&(x, y, _)| (x, y)).collect(), tr.blowup.map(|b| b.0))
}

struct AmplitudeResult {
    trace_error: f64,
    t_star_error_steps: f64,
    exponent_rel_error: f64,
    c_p_rel_error: f64,
}

fn run_amplitude(params: Params, cfg: &BlowupConfig, amplitude: f64, trace: &mut Series, summary: &mut Series) -> Result<AmplitudeResult> {
    let grid = cfg.grid.build()?;
    let p = params.p();
    let data = DataSpec::Plateau { amplitude, radius: cfg.plateau_radius, taper: cfg.taper }.build(params, grid)?;
    let solver = SolverConfig {
        t_end: cfg.t_end,
        blowup_threshold: cfg.blowup_threshold,
        record_stride: usize::MAX,
        ..Default::default()
    };
    let node = grid.index_at_or_above(cfg.trace_radius);
    let r_node = grid.r(node);
    let mut pde: Vec<(f64, f64)> = Vec::new();
    let traj = evolve_observed(&data, &solver, |s| pde.push((s.time, s.v[node] / r_node)))?;
    let dt = traj.dt;
    if amplitude == 0.0 {
        return Ok(AmplitudeResult { trace_error: 0.0, t_star_error_steps: 0.0, exponent_rel_error: 0.0, c_p_rel_error: 0.0 });
    }
    let t_star = match traj.status {
        RunStatus::BlewUp { t_star } => t_star,
        _ => return Err(Error::Mismatch(format!("no blow-up for amplitude {amplitude} before t = {}", cfg.t_end))),
    };
    let t_quad = ode_blowup_time(p, amplitude, 4000);
    let times: Vec<f64> = pde.iter().map(|x| x.0).collect();
    let (ode, t_ode) = ode_oracle(p, amplitude, &times, 2.0 * t_quad);
    let t_ode = t_ode.ok_or_else(|| Error::Mismatch("ODE oracle did not blow up".into()))?;
    if (t_ode - t_quad).abs() > 1e-8 * t_quad {
        return Err(Error::Mismatch(format!("ODE oracles disagree: {t_ode} vs {t_quad}")));
    }

    // the flat region reaches the node unchanged while t < ρ − r
    let core = cfg.plateau_radius - r_node;
    let mut trace_error = 0.0f64;
    for (&(t, w), &(_, y)) in pde.iter().zip(&ode) {
        if t < core && y <= cfg.trace_growth_cap * amplitude {
            let e = (w - y).abs() / y.abs();
            trace_error = trace_error.max(e);
            trace.push(vec![amplitude, t, w, y, e]);
        }
    }

    let (lo, hi) = (cfg.fit_window[0] * amplitude, cfg.fit_window[1] * amplitude);
    let (mut lx, mut ly) = (Vec::new(), Vec::new());
    for &(t, w) in &pde {
        let gap = t_ode - t;
        if w >= lo && w <= hi && gap >= 2.0 * dt {
            lx.push(gap.ln());
            ly.push(w.ln());
        }
    }
    let target = -2.0 / (p - 1.0);
    let (slope, c_fit) = if lx.len() >= 3 {
        let (slope, _) = linear_fit(&lx, &ly);
        // amplitude with the exponent pinned to its exact value
        let logc = lx.iter().zip(&ly).map(|(x, y)| y - target * x).sum::<f64>() / lx.len() as f64;
        (slope, logc.exp())
    } else {
        (f64::NAN, f64::NAN)
    };
    let c_p = selfsimilar_constant(p);
    summary.push(vec![amplitude, t_star, t_ode, t_quad, slope, c_fit, trace_error]);
    Ok(AmplitudeResult {
        trace_error,
        t_star_error_steps: (t_star - t_ode).abs() / dt,
        exponent_rel_error: ((slope - target) / target).abs(),
        c_p_rel_error: ((c_fit - c_p) / c_p).abs(),
    })
}

pub fn run_blowup_ode(params: Params, cfg: &BlowupConfig) -> Result<ExperimentOutput> {
    if params.iota() != Sign::Focusing {
        return Err(Error::PreconditionViolated("blow-up oracle needs the focusing sign".into()));
    }
    let mut trace = Series::new("trace", &["amplitude", "t", "w_pde", "y_ode", "rel_error"]);
    let mut summary = Series::new("blowup", &["amplitude", "t_star", "T_ode", "T_quadrature", "fitted_exponent", "fitted_c", "trace_error"]);
    let mut worst = AmplitudeResult { trace_error: 0.0, t_star_error_steps: 0.0, exponent_rel_error: 0.0, c_p_rel_error: 0.0 };
    for &a in &cfg.amplitudes {
        let r = run_amplitude(params, cfg, a, &mut trace, &mut summary)?;
        worst.trace_error = worst.trace_error.max(r.trace_error);
        worst.t_star_error_steps = worst.t_star_error_steps.max(r.t_star_error_steps);
        worst.exponent_rel_error = worst.exponent_rel_error.max(r.exponent_rel_error);
        worst.c_p_rel_error = worst.c_p_rel_error.max(r.c_p_rel_error);
    }
    let mut b = ReportBuilder::new("blowup_ode", Some(params), cfg);
    b.metric("trace_error", worst.trace_error)
        .metric("t_star_error_steps", worst.t_star_error_steps)
        .metric("selfsim_exponent_rel_error", worst.exponent_rel_error)
        .metric("c_p_rel_error", worst.c_p_rel_error)
        .metric("c_p", selfsimilar_constant(params.p()));
    if cfg.amplitudes.iter().all(|&a| a == 0.0) {
        b.note("zero amplitude only: nothing blows up, comparison vacuous");
    }
    b.series(summary).series(trace);
    b.finish()
}
