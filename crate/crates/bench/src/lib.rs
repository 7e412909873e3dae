//! Shared fixtures for the benchmarks.

use rwl_core::experiments::data::DataSpec;
use rwl_core::{Params, RadialGrid, RadialState, Sign};

pub fn p7(iota: Sign) -> Params {
    Params::new(7.0, iota).expect("p = 7 is supercritical")
}

/// Gaussian data of the given amplitude on `[0, r_max]` with `n` cells.
pub fn gaussian_state(params: Params, r_max: f64, n: usize, amplitude: f64) -> RadialState {
    let grid = RadialGrid::new(r_max, n).expect("valid grid");
    DataSpec::Gaussian { amplitude, width: 1.0, velocity: 0.0 }
        .build(params, grid)
        .expect("valid data")
}
