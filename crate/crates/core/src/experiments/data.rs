//! Initial-data families and grid specifications shared by the experiments.

use serde::{Deserialize, Serialize};

use crate::dalembert::FreeWaveProfile;
use crate::error::{Error, Result};
use crate::grid::{RadialGrid, RadialState, SampledFunction};
use crate::model::Params;
use crate::operators::chi;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r_max: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn build(&self) -> Result<RadialGrid> {
        RadialGrid::new(self.r_max, self.n)
    }
}

/// Compact `C³` bump `(1 - x²)⁴` on `|x| < 1`.
pub fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - x * x).powi(4)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpTerm {
    pub center: f64,
    pub width: f64,
    pub a0: f64,
    pub a1: f64,
}

/// Parameter ranges of the seeded bump family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BumpRanges {
    pub count_min: usize,
    pub count_max: usize,
    pub center_min: f64,
    pub center_max: f64,
    pub width_min: f64,
    pub width_max: f64,
    pub amplitude: f64,
}

impl Default for BumpRanges {
    fn default() -> Self {
        Self {
            count_min: 3,
            count_max: 6,
            center_min: 0.5,
            center_max: 2.5,
            width_min: 0.3,
            width_max: 1.0,
            amplitude: 1.0,
        }
    }
}

impl BumpRanges {
    pub fn draw(&self, rng: &mut SplitMix64) -> Vec<BumpTerm> {
        let count = rng.range_inclusive(self.count_min, self.count_max);
        (0..count)
            .map(|_| BumpTerm {
                center: rng.uniform(self.center_min, self.center_max),
                width: rng.uniform(self.width_min, self.width_max),
                a0: rng.uniform(-self.amplitude, self.amplitude),
                a1: rng.uniform(-self.amplitude, self.amplitude),
            })
            .collect()
    }

    /// Outer edge of every admissible bump.
    pub fn support(&self) -> f64 {
        self.center_max + self.width_max
    }
}

pub fn bump_sum(terms: &[BumpTerm], r: f64) -> (f64, f64) {
    terms.iter().fold((0.0, 0.0), |(a, b), t| {
        let s = bump((r - t.center) / t.width);
        (a + t.a0 * s, b + t.a1 * s)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DataSpec {
    Zero,
    /// `w₀ = A e^{-r²/σ²}`, `w₁ = B e^{-r²/σ²}`.
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        velocity: f64,
    },
    /// Seeded sum of compact bumps in both components.
    Bumps {
        seed: u64,
        #[serde(flatten)]
        ranges: BumpRanges,
    },
    /// `w₀ = A` on `[0, ρ]`, smoothly switched off over `[ρ, ρ + taper]`.
    Plateau { amplitude: f64, radius: f64, taper: f64 },
    /// Tabulated data, linearly interpolated (zero beyond the last radius).
    Samples { r: Vec<f64>, w0: Vec<f64>, w1: Vec<f64> },
}

fn table_interp(r: &[f64], v: &[f64], x: f64) -> f64 {
    if r.is_empty() || x > r[r.len() - 1] {
        return 0.0;
    }
    if x <= r[0] {
        return v[0];
    }
    let k = r.partition_point(|&ri| ri <= x).min(r.len() - 1);
    let (r0, r1) = (r[k - 1], r[k]);
    v[k - 1] + (v[k] - v[k - 1]) * (x - r0) / (r1 - r0)
}

impl DataSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            DataSpec::Gaussian { width, .. } if !(*width > 0.0) => {
                Err(Error::InvalidConfig(format!("gaussian width {width}")))
            }
            DataSpec::Plateau { radius, taper, .. } if !(*radius >= 0.0 && *taper > 0.0) => {
                Err(Error::InvalidConfig("plateau needs radius >= 0, taper > 0".into()))
            }
            DataSpec::Bumps { ranges, .. }
                if ranges.count_min == 0
                    || ranges.count_min > ranges.count_max
                    || !(ranges.width_min > 0.0)
                    || ranges.width_min > ranges.width_max
                    || ranges.center_min > ranges.center_max =>
            {
                Err(Error::InvalidConfig("inconsistent bump ranges".into()))
            }
            DataSpec::Samples { r, w0, w1 } => {
                if r.len() < 2 || r.len() != w0.len() || r.len() != w1.len() {
                    return Err(Error::InvalidConfig("sample columns must have equal length >= 2".into()));
                }
                if r.windows(2).any(|w| !(w[1] > w[0])) || r[0] < 0.0 {
                    return Err(Error::InvalidConfig("sample radii must be increasing and >= 0".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn build(&self, params: Params, grid: RadialGrid) -> Result<RadialState> {
        self.validate()?;
        Ok(match self {
            DataSpec::Zero => RadialState::zero(params, grid),
            DataSpec::Gaussian { amplitude, width, velocity } => {
                let g = |r: f64| (-(r / width).powi(2)).exp();
                RadialState::from_fns(params, grid, |r| amplitude * g(r), |r| velocity * g(r))
            }
            DataSpec::Bumps { seed, ranges } => {
                let terms = ranges.draw(&mut SplitMix64::new(*seed));
                bumps_state(params, grid, &terms)
            }
            DataSpec::Plateau { amplitude, radius, taper } => {
                // chi rises on [1/4, 1/2]; map [ρ, ρ + taper] onto it reversed
                let profile = |r: f64| {
                    let x = 0.5 - 0.25 * (r - radius) / taper;
                    amplitude * chi(x)
                };
                RadialState::from_fns(params, grid, profile, |_| 0.0)
            }
            DataSpec::Samples { r, w0, w1 } => RadialState::from_fns(
                params,
                grid,
                |x| table_interp(r, w0, x),
                |x| table_interp(r, w1, x),
            ),
        })
    }
}

pub fn bumps_state(params: Params, grid: RadialGrid, terms: &[BumpTerm]) -> RadialState {
    RadialState::from_fns(params, grid, |r| bump_sum(terms, r).0, |r| bump_sum(terms, r).1)
}

/// Random smooth, rapidly decaying test function: a seeded sum of 3–6
/// Gaussians with centers in `[0, 3]` (scaled by `scale`).
pub fn random_smooth(rng: &mut SplitMix64, grid: RadialGrid, scale: f64) -> SampledFunction {
    let count = rng.range_inclusive(3, 6);
    let terms: Vec<(f64, f64, f64)> = (0..count)
        .map(|_| (rng.uniform(0.0, 3.0), rng.uniform(0.3, 1.2), rng.uniform(-1.0, 1.0)))
        .collect();
    SampledFunction::from_fn(grid, |r| {
        let x = r / scale;
        terms
            .iter()
            .map(|(c, s, a)| a * (-((x - c) / s).powi(2)).exp())
            .sum()
    })
}

/// Seeded zero-mean piecewise-linear `ḟ` on `|s| <= inner`, vanishing at
/// `±inner`, on a line grid of spacing `h` and half-width `half_width`.
pub fn random_linear_profile(
    params: Params,
    h: f64,
    half_width: f64,
    inner: f64,
    seed: u64,
) -> Result<FreeWaveProfile> {
    let half = (half_width / h).round() as usize;
    let k = ((inner / h).round() as usize).min(half.saturating_sub(1));
    if k < 2 {
        return Err(Error::InvalidConfig(format!("profile support {inner} below two cells")));
    }
    let mut rng = SplitMix64::new(seed);
    let mut fdot = vec![0.0; 2 * half + 1];
    for (j, v) in fdot.iter_mut().enumerate().take(half + k).skip(half - k + 1) {
        let s = (j as f64 - half as f64) * h;
        *v = rng.uniform(-1.0, 1.0) * (1.0 - (s / inner).powi(2));
    }
    let interior = (half - k + 1)..(half + k);
    let mean = fdot[interior.clone()].iter().sum::<f64>() / interior.len() as f64;
    for v in &mut fdot[interior] {
        *v -= mean;
    }
    FreeWaveProfile::from_fdot(params, h, fdot)
}
