//! TOML run configuration.
//!
//! Every block is optional; missing keys take the defaults of the
//! corresponding core configuration. Data may be given inline as a family
//! (`family = "gaussian"`, …) or as `path = "file.csv"` pointing at a CSV
//! with header `r,w0,w1`.

use std::path::{Path, PathBuf};

use rwl_core::experiments::data::{DataSpec, GridSpec};
use rwl_core::experiments::SuiteConfig;
use rwl_core::{Params, Sign, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsBlock {
    pub p: f64,
    /// `1` focusing, `-1` defocusing.
    pub iota: i32,
}

impl Default for ParamsBlock {
    fn default() -> Self {
        Self { p: 7.0, iota: 1 }
    }
}

impl ParamsBlock {
    pub fn build(&self) -> Result<Params, CliError> {
        let sign = Sign::from_value(self.iota)
            .ok_or_else(|| CliError::Config(format!("params.iota must be 1 or -1, got {}", self.iota)))?;
        Params::new(self.p, sign).map_err(|e| CliError::Config(format!("params: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DataBlock {
    File { path: PathBuf },
    Inline(DataSpec),
}

impl DataBlock {
    /// Inline data as is; file data read into tabulated samples.
    pub fn resolve(&self) -> Result<DataSpec, CliError> {
        match self {
            DataBlock::Inline(spec) => {
                spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
                Ok(spec.clone())
            }
            DataBlock::File { path } => read_samples(path),
        }
    }
}

fn read_samples(path: &Path) -> Result<DataSpec, CliError> {
    let bad = |msg: String| CliError::Config(format!("{}: {msg}", path.display()));
    let mut rdr = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let header: Vec<String> = rdr.headers().map_err(|e| bad(e.to_string()))?.iter().map(str::to_owned).collect();
    if header != ["r", "w0", "w1"] {
        return Err(bad(format!("expected header r,w0,w1, found {}", header.join(","))));
    }
    let (mut r, mut w0, mut w1) = (Vec::new(), Vec::new(), Vec::new());
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let num = |j: usize| -> Result<f64, CliError> {
            rec[j].trim().parse::<f64>().map_err(|e| bad(format!("line {}: {e}", k + 2)))
        };
        r.push(num(0)?);
        w0.push(num(1)?);
        w1.push(num(2)?);
    }
    let spec = DataSpec::Samples { r, w0, w1 };
    spec.validate().map_err(|e| bad(e.to_string()))?;
    Ok(spec)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateBlock {
    pub grid: GridSpec,
    pub data: DataBlock,
    pub solver: SolverConfig,
    /// Radius `R` of the exterior energy column.
    pub exterior_radius: f64,
    /// Blow-up is then an expected outcome rather than a numerical failure.
    pub expect_blowup: bool,
}

impl Default for SimulateBlock {
    fn default() -> Self {
        Self {
            grid: GridSpec { r_max: 16.0, n: 2048 },
            data: DataBlock::Inline(DataSpec::Gaussian { amplitude: 0.5, width: 1.0, velocity: 0.0 }),
            solver: SolverConfig { t_end: 5.0, record_stride: 16, ..Default::default() },
            exterior_radius: 1.0,
            expect_blowup: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinearBlock {
    pub grid: GridSpec,
    pub data: DataBlock,
    pub times: Vec<f64>,
}

impl Default for LinearBlock {
    fn default() -> Self {
        Self {
            grid: GridSpec { r_max: 16.0, n: 1024 },
            data: DataBlock::Inline(DataSpec::Gaussian { amplitude: 1.0, width: 1.0, velocity: 0.0 }),
            times: (0..=5).map(f64::from).collect(),
        }
    }
}

/// Function whose norm table `rwl norms` reports (its `w0` component).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormsInputBlock {
    pub grid: GridSpec,
    pub data: Option<DataBlock>,
    pub utov_radii: Vec<f64>,
}

impl Default for NormsInputBlock {
    fn default() -> Self {
        Self { grid: GridSpec { r_max: 16.0, n: 32000 }, data: None, utov_radii: vec![0.0, 0.5, 1.0, 2.0] }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Overrides every experiment seed when present (TOML integers are
    /// signed, so configured seeds must be below 2^63).
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub params: ParamsBlock,
    pub output: OutputBlock,
    pub simulate: SimulateBlock,
    pub linear: LinearBlock,
    pub norms_input: NormsInputBlock,
    pub experiments: SuiteConfig,
}

impl RunConfig {
    /// Parse and validate; referenced data files must exist.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_owned(), source: e })?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params.build()?;
        for data in [Some(&self.simulate.data), Some(&self.linear.data), self.norms_input.data.as_ref()]
            .into_iter()
            .flatten()
        {
            if let DataBlock::File { path } = data {
                if !path.exists() {
                    return Err(CliError::Config(format!("data file {} does not exist", path.display())));
                }
            }
            data.resolve()?;
        }
        if self.threads == Some(0) {
            return Err(CliError::Config("threads must be positive".into()));
        }
        Ok(())
    }

    /// Experiment configurations with the seed override applied.
    pub fn suite(&self, seed: Option<u64>) -> SuiteConfig {
        match seed.or(self.seed) {
            Some(s) => self.experiments.clone().with_seed(s),
            None => self.experiments.clone(),
        }
    }
}
