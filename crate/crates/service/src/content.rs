use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use anyhow::Context;
use chrono::NaiveDate;
use serde::Serialize;

use vigilsim::error::ConfigError;
use vigilsim::scenario::Provenance;
use vigilsim::{Scenario, SimConfig};

/// Curated scenarios and configs, keyed by file stem.
///
/// A config that fails validation is kept with its error so that creating a
/// session with it reports the offending field.
#[derive(Debug, Default)]
pub struct Content {
    scenarios: BTreeMap<String, Arc<Scenario>>,
    configs: BTreeMap<String, Result<SimConfig, ConfigError>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioInfo {
    pub name: String,
    pub title: String,
    pub days: usize,
    pub first_date: NaiveDate,
    pub last_date: NaiveDate,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigInfo {
    pub name: String,
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residents: Option<u32>,
}

fn entries(dir: &Path, ext: &str) -> anyhow::Result<Vec<(String, std::path::PathBuf)>> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).with_context(|| format!("list {}", dir.display()))? {
        let path = entry?.path();
        if path.extension().and_then(|e| e.to_str()) != Some(ext) {
            continue;
        }
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            out.push((stem.to_string(), path));
        }
    }
    Ok(out)
}

impl Content {
    /// Reads `dir/scenarios/*.json` and `dir/configs/*.toml`. A scenario
    /// that does not load is a startup error.
    pub fn discover(dir: &Path) -> anyhow::Result<Self> {
        let mut content = Content::default();
        for (name, path) in entries(&dir.join("scenarios"), "json")? {
            let scenario = Scenario::load(&path)?;
            content.scenarios.insert(name, Arc::new(scenario));
        }
        for (name, path) in entries(&dir.join("configs"), "toml")? {
            let text = std::fs::read_to_string(&path).with_context(|| format!("read {}", path.display()))?;
            content.configs.insert(name, SimConfig::from_toml(&text));
        }
        Ok(content)
    }

    pub fn insert_scenario(&mut self, name: impl Into<String>, scenario: Scenario) {
        self.scenarios.insert(name.into(), Arc::new(scenario));
    }

    pub fn insert_config(&mut self, name: impl Into<String>, config: Result<SimConfig, ConfigError>) {
        self.configs.insert(name.into(), config);
    }

    pub fn scenario(&self, name: &str) -> Option<&Arc<Scenario>> {
        self.scenarios.get(name)
    }

    pub fn config(&self, name: &str) -> Option<&Result<SimConfig, ConfigError>> {
        self.configs.get(name)
    }

    pub fn scenario_infos(&self) -> Vec<ScenarioInfo> {
        self.scenarios
            .iter()
            .map(|(name, s)| ScenarioInfo {
                name: name.clone(),
                title: s.name().to_string(),
                days: s.len(),
                first_date: s.days()[0].date,
                last_date: s.days()[s.len() - 1].date,
                provenance: s.provenance(),
            })
            .collect()
    }

    pub fn config_infos(&self) -> Vec<ConfigInfo> {
        self.configs
            .iter()
            .map(|(name, c)| ConfigInfo {
                name: name.clone(),
                valid: c.is_ok(),
                residents: c.as_ref().ok().map(|c| c.population.size),
            })
            .collect()
    }
}
