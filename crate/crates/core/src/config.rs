//! The simulation configuration document (TOML).
//!
//! ```toml
//! schema_version = 1
//!
//! [population]
//! size = 200
//! seed = 7
//! trust_init = { kind = "uniform", low = 0.3, high = 0.9 }
//! threshold_mm = { kind = "uniform", low = 20.0, high = 120.0 }
//! memory_depth = { kind = "uniform", low = 1, high = 5 }
//!
//! [trust]
//! gain_slight = 0.02
//! loss_false_alarm_rate = 0.15
//! loss_missed_rate = 0.40
//! surprise_tolerance_mm = 10.0
//! ```
//!
//! `[trust]`, `[scale]`, `[episode]` and `[[events]]` are optional.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::agent::TrustParams;
use crate::engine::{default_event_rules, EngineSettings, EventRule, DEFAULT_RESET_AFTER_GREEN_DAYS};
use crate::error::ConfigError;
use crate::population::PopulationConfig;
use crate::scenario::{ColourScale, Scenario};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpisodeConfig {
    pub reset_after_green_days: u32,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self {
            reset_after_green_days: DEFAULT_RESET_AFTER_GREEN_DAYS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub schema_version: u32,
    pub population: PopulationConfig,
    #[serde(default)]
    pub trust: TrustParams,
    /// Overrides the scenario's own colour scale.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<ColourScale>,
    #[serde(default)]
    pub episode: EpisodeConfig,
    /// Replaces the default event rules when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub events: Option<Vec<EventRule>>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            schema_version: CONFIG_SCHEMA_VERSION,
            population: PopulationConfig::default(),
            trust: TrustParams::default(),
            scale: None,
            episode: EpisodeConfig::default(),
            events: None,
        }
    }
}

impl SimConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            ConfigError::general(msg)
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        use anyhow::Context;
        let text = std::fs::read_to_string(path).with_context(|| format!("read config {}", path.display()))?;
        Ok(Self::from_toml(&text)?)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(ConfigError::field(
                "schema_version",
                format!("unsupported version {} (expected {CONFIG_SCHEMA_VERSION})", self.schema_version),
            ));
        }
        self.population.validate()?;
        self.trust.validate()?;
        if let Some(rules) = &self.events {
            crate::engine::validate_rules(rules)?;
        }
        Ok(())
    }

    /// The scenario as it will be played: with the configured scale, if any.
    pub fn apply_scale(&self, scenario: Scenario) -> Scenario {
        match self.scale {
            Some(scale) => scenario.with_scale(scale),
            None => scenario,
        }
    }

    pub fn engine_settings(&self, scale: &ColourScale) -> EngineSettings {
        EngineSettings {
            trust: self.trust,
            event_rules: self.events.clone().unwrap_or_else(|| default_event_rules(scale)),
            reset_after_green_days: self.episode.reset_after_green_days,
        }
    }
}
