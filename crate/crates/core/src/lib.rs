//! Numerical laboratory for the radial energy-supercritical wave equation
//! `∂_tt w - Δw = ι|w|^{p-1} w` on ℝ³, `p > 5`.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dalembert;
pub mod energetics;
pub mod experiments;
pub mod error;
pub mod grid;
pub mod model;
pub mod nonlinear;
pub mod ode;
pub mod operators;
pub mod rng;
pub mod stationary;

pub use dalembert::{build_free_profile, FreeWaveProfile};
pub use error::{Error, Result};
pub use grid::{RadialGrid, RadialState, SampledFunction};
pub use model::{make_params, Params, Sign};
pub use nonlinear::{RunStatus, SolverConfig, Trajectory};
