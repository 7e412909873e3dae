//! Registry of experiments and a combined, partially specifiable
//! configuration for all of them.

use serde::{Deserialize, Serialize};

use super::blowup::{run_blowup_ode, BlowupConfig};
use super::channel::{run_channel, ChannelConfig};
use super::conservation::{run_conservation, ConservationConfig};
use super::data::DataSpec;
use super::decay::{run_exterior_decay, DecayConfig};
use super::finite_speed::{run_finite_speed, FiniteSpeedConfig};
use super::huygens::{run_huygens, HuygensConfig};
use super::linear::{run_linear_exactness, LinearExactnessConfig};
use super::norms::{run_norms, NormsConfig};
use super::operator_bounds::{run_operator_bounds, OperatorBoundsConfig};
use super::report::ExperimentOutput;
use super::smalldata::{run_smalldata, SmallDataConfig};
use super::stationary_suite::{run_stationary_suite, StationarySuiteConfig};
use crate::error::{Error, Result};
use crate::model::{Params, Sign};

/// Experiment names in the order `all` runs them.
pub const EXPERIMENTS: [&str; 11] = [
    "linear_exactness",
    "finite_speed",
    "conservation",
    "channel",
    "huygens",
    "exterior_decay",
    "smalldata",
    "stationary",
    "blowup_ode",
    "operator_bounds",
    "norms",
];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub linear_exactness: LinearExactnessConfig,
    pub finite_speed: FiniteSpeedConfig,
    pub conservation: ConservationConfig,
    pub channel: ChannelConfig,
    pub huygens: HuygensConfig,
    pub exterior_decay: DecayConfig,
    pub smalldata: SmallDataConfig,
    pub stationary: StationarySuiteConfig,
    pub blowup_ode: BlowupConfig,
    pub operator_bounds: OperatorBoundsConfig,
    pub norms: NormsConfig,
}

fn reseed(data: &mut DataSpec, seed: u64) {
    if let DataSpec::Bumps { seed: s, .. } = data {
        *s = seed;
    }
}

impl SuiteConfig {
    /// Override every random seed with `seed`.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.linear_exactness.seed = seed;
        self.finite_speed.seed = seed;
        reseed(&mut self.finite_speed.data, seed);
        self.channel.seed = seed;
        reseed(&mut self.huygens.data, seed);
        reseed(&mut self.exterior_decay.data, seed);
        reseed(&mut self.smalldata.base, seed);
        reseed(&mut self.conservation.data, seed);
        self.operator_bounds.seed = seed;
        self.norms.seed = seed;
        self
    }
}

/// Run one experiment by name.
///
/// The ODE blow-up comparison only makes sense for the focusing sign and
/// always runs with it; the sign used is recorded in its report.
pub fn run_experiment(name: &str, params: Params, cfg: &SuiteConfig) -> Result<ExperimentOutput> {
    match name {
        "linear_exactness" => run_linear_exactness(params, &cfg.linear_exactness),
        "finite_speed" => run_finite_speed(params, &cfg.finite_speed),
        "conservation" => run_conservation(params, &cfg.conservation),
        "channel" => run_channel(params, &cfg.channel),
        "huygens" => run_huygens(params, &cfg.huygens),
        "exterior_decay" => run_exterior_decay(params, &cfg.exterior_decay),
        "smalldata" => run_smalldata(params, &cfg.smalldata),
        "stationary" => run_stationary_suite(params, &cfg.stationary),
        "blowup_ode" => run_blowup_ode(params.with_sign(Sign::Focusing), &cfg.blowup_ode),
        "operator_bounds" => run_operator_bounds(params, &cfg.operator_bounds),
        "norms" => run_norms(params, &cfg.norms),
        other => Err(Error::InvalidConfig(format!("unknown experiment `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::report::thresholds_for;

    #[test]
    fn every_experiment_has_thresholds() {
        for name in EXPERIMENTS {
            assert!(!thresholds_for(name).unwrap().is_empty(), "{name}");
        }
        let params = Params::new(7.0, Sign::Focusing).unwrap();
        assert!(run_experiment("bogus", params, &SuiteConfig::default()).is_err());
    }

    #[test]
    fn partial_json_fills_defaults() {
        let cfg: SuiteConfig = serde_json::from_str(r#"{"channel": {"trials": 3}}"#).unwrap();
        assert_eq!(cfg.channel.trials, 3);
        assert_eq!(cfg.channel.radius, ChannelConfig::default().radius);
        assert_eq!(cfg.norms, NormsConfig::default());
    }

    #[test]
    fn seed_override_reaches_data() {
        let cfg = SuiteConfig::default().with_seed(7);
        assert_eq!(cfg.channel.seed, 7);
        assert!(matches!(cfg.huygens.data, DataSpec::Bumps { seed: 7, .. }));
    }
}
