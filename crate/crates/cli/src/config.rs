//! Run configuration: flat TOML with one section per subcommand.
//!
//! Every key has a default, so an empty (or absent) config is a valid run;
//! the fully resolved configuration is written alongside the results so any
//! output is regenerable from its sidecar.

use std::path::Path;

use asyncov::model::ScenarioTag;
use asyncov::sampling::{MonotoneMap, PlanKind};
use asyncov::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub model: ModelSection,
    pub sampling: SamplingSection,
    pub simulate: SimulateSection,
    pub estimate: EstimateSection,
    pub functionals: FunctionalsSection,
    pub mc: McSection,
    pub table1: Table1Section,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub drift1: f64,
    pub drift2: f64,
    pub vol1: f64,
    pub vol2: f64,
    pub rho: f64,
    pub horizon: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self { drift1: 0.1, drift2: 0.1, vol1: 1.0, vol2: 1.0, rho: 0.5, horizon: 1.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingSection {
    /// regular | transformed | alternating | poisson
    pub scheme: String,
    pub n: usize,
    /// Poisson rate multiplier λ.
    pub lambda: f64,
    /// Alternating offset α ∈ (0, 1).
    pub alpha: f64,
    /// Exponent of the power map for the transformed scheme.
    pub power: f64,
}

impl Default for SamplingSection {
    fn default() -> Self {
        Self { scheme: "poisson".into(), n: 1_000, lambda: 1.0, alpha: 0.5, power: 2.0 }
    }
}

impl SamplingSection {
    pub fn kind(&self) -> Result<PlanKind> {
        match self.scheme.as_str() {
            "regular" => Ok(PlanKind::Regular),
            "transformed" => Ok(PlanKind::Transformed { map: MonotoneMap::Power(self.power) }),
            "alternating" => Ok(PlanKind::Alternating { alpha: self.alpha }),
            "poisson" => Ok(PlanKind::Poisson { rate: self.lambda }),
            other => Err(Error::Config(format!("unknown sampling scheme '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSection {
    /// sc1 | sc2 | sc3 | none
    pub scenario: String,
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self { scenario: "sc1".into() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimateSection {
    pub t: f64,
    pub scenario: String,
}

impl Default for EstimateSection {
    fn default() -> Self {
        Self { t: 1.0, scenario: "sc1".into() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FunctionalsSection {
    pub n_values: Vec<usize>,
    /// Grid draws averaged per n for random schemes.
    pub seeds: usize,
}

impl Default for FunctionalsSection {
    fn default() -> Self {
        Self { n_values: vec![1_000, 10_000, 100_000], seeds: 10 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McSection {
    pub scenario: String,
    pub rho: f64,
    pub expected_obs: usize,
    pub reps: usize,
}

impl Default for McSection {
    fn default() -> Self {
        Self { scenario: "sc1".into(), rho: 0.5, expected_obs: 5_000, reps: 500 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Table1Section {
    pub scenarios: Vec<String>,
    pub rhos: Vec<f64>,
    pub expected_obs: usize,
    pub reps: usize,
}

impl Default for Table1Section {
    fn default() -> Self {
        Self {
            scenarios: vec!["sc1".into(), "sc2".into(), "sc3".into()],
            rhos: (0..=10).map(|i| i as f64 / 10.0).collect(),
            expected_obs: 5_000,
            reps: 500,
        }
    }
}

pub fn parse_scenario(s: &str) -> Result<ScenarioTag> {
    s.parse()
}

impl Config {
    /// Loads a config file; a missing path is the dedicated exit-2 error.
    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::Config(format!("config not found: {}", path.display())));
        }
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_round_trips() {
        let cfg = Config::default();
        let text = toml::to_string_pretty(&cfg).unwrap();
        let back: Config = toml::from_str(&text).unwrap();
        assert_eq!(back.table1.rhos.len(), 11);
        assert_eq!(back.mc.expected_obs, 5_000);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = toml::from_str::<Config>("[mc]\ntypo_field = 1\n").unwrap_err();
        assert!(err.to_string().contains("typo_field"));
    }

    #[test]
    fn scheme_parsing() {
        let mut s = SamplingSection::default();
        assert!(matches!(s.kind().unwrap(), PlanKind::Poisson { .. }));
        s.scheme = "alternating".into();
        assert!(matches!(s.kind().unwrap(), PlanKind::Alternating { .. }));
        s.scheme = "bogus".into();
        assert!(s.kind().is_err());
    }
}
