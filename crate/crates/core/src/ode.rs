//! Adaptive Dormand–Prince 5(4) integration for small fixed-size systems,
//! plus a continuation through finite-time blow-up for scalar second-order
//! equations `u'' = g(x, u)`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_min: 1e-14,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    /// Reached the requested end point.
    Completed,
    /// The stop predicate fired after an accepted step.
    Stopped,
    /// The step size fell below `h_min`: `(last accepted x, attempted x)`.
    StepUnderflow { accepted: f64, attempted: f64 },
    MaxSteps,
    NonFinite,
}

#[derive(Debug, Clone)]
pub struct Trace<const N: usize> {
    /// Every accepted step, starting with the initial point.
    pub steps: Vec<(f64, [f64; N])>,
    /// Values at the requested output points that were reached.
    pub outputs: Vec<(f64, [f64; N])>,
    pub termination: Termination,
}

impl<const N: usize> Trace<N> {
    pub fn last(&self) -> (f64, [f64; N]) {
        *self.steps.last().expect("trace starts with the initial point")
    }
}

// Dormand–Prince tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])], h: f64) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

fn error_norm<const N: usize>(err: &[f64; N], y: &[f64; N], y_new: &[f64; N], tol: &Tolerances) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sc = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
        acc += (err[i] / sc).powi(2);
    }
    (acc / N as f64).sqrt()
}

fn initial_step<const N: usize, F>(f: &F, x0: f64, y0: &[f64; N], span: f64, tol: &Tolerances) -> f64
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let f0 = f(x0, y0);
    let sc = |i: usize| tol.atol + tol.rtol * y0[i].abs();
    let d0 = (0..N).map(|i| (y0[i] / sc(i)).powi(2)).sum::<f64>().sqrt();
    let d1 = (0..N).map(|i| (f0[i] / sc(i)).powi(2)).sum::<f64>().sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let y1 = axpy(y0, &[(1.0, &f0)], h0);
    let f1 = f(x0 + h0, &y1);
    let d2 = (0..N)
        .map(|i| ((f1[i] - f0[i]) / sc(i)).powi(2))
        .sum::<f64>()
        .sqrt()
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span).min(tol.h_max).max(tol.h_min)
}

/// Integrate `y' = f(x, y)` from `x0` to `x_end > x0`.
///
/// Step ends are forced onto every point of `outputs` (ascending). After
/// each accepted step `stop(x, y)` is consulted; returning `true` ends the
/// integration with [`Termination::Stopped`].
pub fn integrate<const N: usize, F, S>(
    f: F,
    x0: f64,
    y0: [f64; N],
    x_end: f64,
    tol: &Tolerances,
    outputs: &[f64],
    stop: S,
) -> Trace<N>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    S: Fn(f64, &[f64; N]) -> bool,
{
    let mut steps = vec![(x0, y0)];
    let mut out = Vec::new();
    let mut next_out = outputs.iter().position(|&o| o > x0).unwrap_or(outputs.len());
    for &o in outputs.iter().take(next_out) {
        if o == x0 {
            out.push((x0, y0));
        }
    }
    if !(x_end > x0) {
        return Trace {
            steps,
            outputs: out,
            termination: Termination::Completed,
        };
    }
    let mut x = x0;
    let mut y = y0;
    let mut h = initial_step(&f, x0, &y0, x_end - x0, tol);
    let mut k1 = f(x, &y);
    let mut n_steps = 0usize;
    loop {
        if n_steps >= tol.max_steps {
            return Trace { steps, outputs: out, termination: Termination::MaxSteps };
        }
        let mut target = x_end;
        let mut hits_output = false;
        if next_out < outputs.len() && outputs[next_out] <= x_end {
            target = outputs[next_out];
            hits_output = true;
        }
        let mut lands = false;
        if x + h >= target {
            h = target - x;
            lands = true;
        }
        if h < tol.h_min && !lands {
            return Trace {
                steps,
                outputs: out,
                termination: Termination::StepUnderflow { accepted: x, attempted: x + h },
            };
        }
        let k2 = f(x + C2 * h, &axpy(&y, &[(A21, &k1)], h));
        let k3 = f(x + C3 * h, &axpy(&y, &[(A31, &k1), (A32, &k2)], h));
        let k4 = f(x + C4 * h, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
        let k5 = f(
            x + C5 * h,
            &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
        );
        let k6 = f(
            x + h,
            &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h),
        );
        let y_new = axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
        let k7 = f(x + h, &y_new);
        let mut err = [0.0; N];
        for i in 0..N {
            err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let en = error_norm(&err, &y, &y_new, tol);
        n_steps += 1;
        if !en.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            if h <= tol.h_min {
                return Trace { steps, outputs: out, termination: Termination::NonFinite };
            }
            h = (0.1 * h).max(tol.h_min);
            continue;
        }
        if en <= 1.0 {
            x = if lands { target } else { x + h };
            y = y_new;
            k1 = k7;
            steps.push((x, y));
            if lands && hits_output {
                out.push((x, y));
                next_out += 1;
            }
            if stop(x, &y) {
                return Trace { steps, outputs: out, termination: Termination::Stopped };
            }
            if lands && !hits_output {
                return Trace { steps, outputs: out, termination: Termination::Completed };
            }
            if x >= x_end {
                return Trace { steps, outputs: out, termination: Termination::Completed };
            }
            let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
            h = (h * fac).min(tol.h_max);
        } else {
            let fac = (0.9 * en.powf(-0.2)).clamp(0.1, 1.0);
            let h_try = h * fac;
            if h_try < tol.h_min {
                return Trace {
                    steps,
                    outputs: out,
                    termination: Termination::StepUnderflow { accepted: x, attempted: x + h },
                };
            }
            h = h_try;
        }
    }
}

/// Outcome of [`integrate_through_blowup`].
#[derive(Debug, Clone)]
pub struct BlowupTrace {
    /// Accepted samples `(x, u, u')` in increasing `x`.
    pub samples: Vec<(f64, f64, f64)>,
    /// Samples at requested output points reached before blow-up.
    pub outputs: Vec<(f64, f64, f64)>,
    /// Blow-up abscissa and the width of the bracket containing it.
    pub blowup: Option<(f64, f64)>,
    pub termination: Termination,
}

/// Integrate `u'' = g(x, u)` from `x0` towards `x_end`, following a
/// finite-time blow-up up to `|u| = threshold`.
///
/// Once `|u|` exceeds `switch_level` with `u u' > 0`, the independent
/// variable becomes `τ = ln|u|` (`dx/dτ = u/u'`, `du'/dτ = u g/u'`), which
/// stays well conditioned while `x` approaches the singularity.
/// `growth_power` is the exponent `q` in `g ~ |u|^{q-1} u` near blow-up; it
/// sizes the remaining distance `u / (u' (q-1)/2)` beyond the threshold.
#[allow(clippy::too_many_arguments)]
pub fn integrate_through_blowup<G>(
    g: G,
    x0: f64,
    u0: f64,
    up0: f64,
    x_end: f64,
    threshold: f64,
    switch_level: f64,
    growth_power: f64,
    tol: &Tolerances,
    outputs: &[f64],
) -> BlowupTrace
where
    G: Fn(f64, f64) -> f64,
{
    let rhs = |x: f64, y: &[f64; 2]| [y[1], g(x, y[0])];
    let switch = |_x: f64, y: &[f64; 2]| y[0].abs() >= switch_level && y[0] * y[1] > 0.0;
    let phase1 = integrate(rhs, x0, [u0, up0], x_end, tol, outputs, switch);
    let mut samples: Vec<(f64, f64, f64)> = phase1.steps.iter().map(|(x, y)| (*x, y[0], y[1])).collect();
    let outs: Vec<(f64, f64, f64)> = phase1.outputs.iter().map(|(x, y)| (*x, y[0], y[1])).collect();
    match phase1.termination {
        Termination::Stopped => {}
        Termination::StepUnderflow { accepted, attempted } => {
            return BlowupTrace {
                samples,
                outputs: outs,
                blowup: Some((0.5 * (accepted + attempted), attempted - accepted)),
                termination: phase1.termination,
            };
        }
        other => {
            return BlowupTrace { samples, outputs: outs, blowup: None, termination: other };
        }
    }
    let (xs, ys) = phase1.last();
    let sign = ys[0].signum();
    let tau0 = ys[0].abs().ln();
    let tau_end = threshold.ln();
    // state (x, u') as functions of τ; u = sign · e^τ
    let rhs2 = |tau: f64, z: &[f64; 2]| {
        let u = sign * tau.exp();
        let up = z[1];
        [u / up, u * g(z[0], u) / up]
    };
    let past_end = |_tau: f64, z: &[f64; 2]| z[0] > x_end;
    let tol2 = Tolerances { h_min: 1e-12, ..*tol };
    let phase2 = integrate(rhs2, tau0, [xs, ys[1]], tau_end, &tol2, &[], past_end);
    for (tau, z) in phase2.steps.iter().skip(1) {
        if z[0] > x_end {
            break;
        }
        samples.push((z[0], sign * tau.exp(), z[1]));
    }
    let blowup = match phase2.termination {
        Termination::Completed => {
            let (tau, z) = phase2.last();
            let u = tau.exp();
            let remaining = u / (z[1].abs() * 0.5 * (growth_power - 1.0));
            let x_star = z[0] + remaining;
            (x_star <= x_end).then_some((x_star, remaining))
        }
        _ => None,
    };
    BlowupTrace { samples, outputs: outs, blowup, termination: phase2.termination }
}
