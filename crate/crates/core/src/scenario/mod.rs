//! Scenarios: the colour scale, daily records, historical ingestion and
//! generated teaching sequences.

mod generator;
mod historical;
pub mod ingest;
mod scale;

use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::colour::VigilanceColour;
use crate::error::ScenarioError;

pub use generator::{generate_pedagogical_scenario, GeneratorConfig, Ordering, Template, TemplateKind};
pub use historical::{build_historical_scenario, ForecastModel};
pub use ingest::{load_rain_series, load_vigilance_series, RainSeries, VigilanceSeries};
pub use scale::ColourScale;

/// Format version written into scenario archives.
pub const SCENARIO_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDay {
    pub date: NaiveDate,
    pub observed_rain_mm: f64,
    /// Forecast for this day, issued the previous evening.
    pub forecast_rain_mm: f64,
    pub forecast_confidence: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub historical_colour: Option<VigilanceColour>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Historical,
    Generated { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioArchive", into = "ScenarioArchive")]
pub struct Scenario {
    name: String,
    scale: ColourScale,
    provenance: Provenance,
    days: Vec<ScenarioDay>,
}

/// On-disk layout of a scenario.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioArchive {
    schema_version: u32,
    name: String,
    provenance: Provenance,
    scale: ColourScale,
    days: Vec<ScenarioDay>,
}

impl TryFrom<ScenarioArchive> for Scenario {
    type Error = ScenarioError;

    fn try_from(a: ScenarioArchive) -> Result<Self, Self::Error> {
        if a.schema_version != SCENARIO_SCHEMA_VERSION {
            return Err(ScenarioError::Config(crate::error::ConfigError::field(
                "schema_version",
                format!("unsupported scenario schema {} (expected {SCENARIO_SCHEMA_VERSION})", a.schema_version),
            )));
        }
        Scenario::new(a.name, a.scale, a.provenance, a.days)
    }
}

impl From<Scenario> for ScenarioArchive {
    fn from(s: Scenario) -> Self {
        ScenarioArchive {
            schema_version: SCENARIO_SCHEMA_VERSION,
            name: s.name,
            provenance: s.provenance,
            scale: s.scale,
            days: s.days,
        }
    }
}

impl Scenario {
    pub fn new(
        name: impl Into<String>,
        scale: ColourScale,
        provenance: Provenance,
        days: Vec<ScenarioDay>,
    ) -> Result<Self, ScenarioError> {
        if days.is_empty() {
            return Err(ScenarioError::Empty);
        }
        for (index, day) in days.iter().enumerate() {
            let bad = |message: &str| ScenarioError::Day {
                index,
                message: message.to_string(),
            };
            if !(day.observed_rain_mm.is_finite() && day.observed_rain_mm >= 0.0) {
                return Err(bad("observed rain must be >= 0"));
            }
            if !(day.forecast_rain_mm.is_finite() && day.forecast_rain_mm >= 0.0) {
                return Err(bad("forecast rain must be >= 0"));
            }
            if !(0.0..=1.0).contains(&day.forecast_confidence) {
                return Err(bad("forecast confidence must be in [0, 1]"));
            }
            if index > 0 {
                let expected = days[index - 1].date.succ_opt().expect("date in range");
                if day.date != expected {
                    return Err(ScenarioError::Cadence {
                        index,
                        expected,
                        found: day.date,
                    });
                }
            }
        }
        Ok(Self {
            name: name.into(),
            scale,
            provenance,
            days,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn scale(&self) -> &ColourScale {
        &self.scale
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn days(&self) -> &[ScenarioDay] {
        &self.days
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    /// Days within `[from, to]`, keeping name, scale and provenance.
    pub fn trimmed(&self, from: NaiveDate, to: NaiveDate) -> Result<Scenario, ScenarioError> {
        let days = self
            .days
            .iter()
            .filter(|d| d.date >= from && d.date <= to)
            .cloned()
            .collect();
        Scenario::new(self.name.clone(), self.scale, self.provenance, days)
    }

    /// Same days under a different colour scale.
    pub fn with_scale(mut self, scale: ColourScale) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        use anyhow::Context;
        let text = std::fs::read_to_string(path).with_context(|| format!("read scenario {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("parse scenario {}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn day(date: &str, rain: f64) -> ScenarioDay {
        ScenarioDay {
            date: date.parse().unwrap(),
            observed_rain_mm: rain,
            forecast_rain_mm: rain,
            forecast_confidence: 1.0,
            historical_colour: None,
        }
    }

    #[test]
    fn cadence_enforced() {
        let ok = Scenario::new(
            "t",
            ColourScale::default(),
            Provenance::Historical,
            vec![day("2018-10-01", 1.0), day("2018-10-02", 2.0)],
        );
        assert!(ok.is_ok());
        let gap = Scenario::new(
            "t",
            ColourScale::default(),
            Provenance::Historical,
            vec![day("2018-10-01", 1.0), day("2018-10-03", 2.0)],
        );
        assert!(matches!(gap, Err(ScenarioError::Cadence { index: 1, .. })));
        assert_eq!(
            Scenario::new("t", ColourScale::default(), Provenance::Historical, vec![]),
            Err(ScenarioError::Empty)
        );
    }

    #[test]
    fn invalid_day_values() {
        let mut d = day("2018-10-01", 1.0);
        d.forecast_confidence = 1.5;
        assert!(Scenario::new("t", ColourScale::default(), Provenance::Historical, vec![d]).is_err());
        let d = day("2018-10-01", -1.0);
        assert!(Scenario::new("t", ColourScale::default(), Provenance::Historical, vec![d]).is_err());
    }

    #[test]
    fn archive_round_trip() {
        let s = Scenario::new(
            "t",
            ColourScale::default(),
            Provenance::Generated { seed: 4 },
            vec![day("2018-10-01", 1.3), day("2018-10-02", 139.8)],
        )
        .unwrap();
        let text = s.to_json();
        assert!(text.contains("\"schema_version\": 1"));
        assert_eq!(Scenario::from_json(&text).unwrap(), s);
        assert!(Scenario::from_json(&text.replace("2018-10-02", "2018-10-05")).is_err());
    }
}
