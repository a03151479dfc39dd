use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::{classify_alarm, Classification, CommunicationStats, PopulationStats, TriggeredEvent};
use crate::colour::VigilanceColour;
use crate::scenario::ColourScale;

pub const HISTORY_SCHEMA_VERSION: u32 = 1;

/// What was forecast, announced and observed on one played day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DayRecord {
    pub date: NaiveDate,
    pub forecast_rain_mm: f64,
    pub forecast_confidence: f64,
    pub announced: VigilanceColour,
    pub observed_rain_mm: f64,
    pub classification: Classification,
    #[serde(default)]
    pub events: Vec<TriggeredEvent>,
    pub post_alert: PopulationStats,
    pub post_observation: PopulationStats,
}

/// Append-only log of a played session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionHistory {
    pub schema_version: u32,
    pub scenario: String,
    pub records: Vec<DayRecord>,
}

impl SessionHistory {
    pub fn new(scenario: impl Into<String>) -> Self {
        Self {
            schema_version: HISTORY_SCHEMA_VERSION,
            scenario: scenario.into(),
            records: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("history serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let h: SessionHistory = serde_json::from_str(text)?;
        if h.schema_version != HISTORY_SCHEMA_VERSION {
            return Err(serde::de::Error::custom(format!(
                "unsupported history schema {} (expected {HISTORY_SCHEMA_VERSION})",
                h.schema_version
            )));
        }
        Ok(h)
    }

    /// Indices of records whose stored classification disagrees with a
    /// fresh classification under `scale`.
    pub fn inconsistent_records(&self, scale: &ColourScale) -> Vec<usize> {
        self.records
            .iter()
            .enumerate()
            .filter(|(_, r)| classify_alarm(scale, r.announced, r.observed_rain_mm) != r.classification)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn summary(&self) -> HistorySummary {
        let communication = CommunicationStats::from_records(&self.records);
        let first = self.records.first();
        let last = self.records.last();
        HistorySummary {
            scenario: self.scenario.clone(),
            first_date: first.map(|r| r.date),
            last_date: last.map(|r| r.date),
            initial_avg_trust: first.map(|r| r.post_alert.avg_trust),
            final_avg_trust: last.map(|r| r.post_observation.avg_trust),
            min_avg_trust: self
                .records
                .iter()
                .map(|r| r.post_observation.avg_trust)
                .reduce(f64::min),
            peak_evacuated_fraction: self
                .records
                .iter()
                .map(|r| r.post_alert.evacuated_fraction.max(r.post_observation.evacuated_fraction))
                .reduce(f64::max),
            events_fired: self.records.iter().map(|r| r.events.len()).sum(),
            false_alarms: communication.total_false_alarms(),
            missed_alarms: communication.total_missed_alarms(),
            communication,
        }
    }
}

/// Headline numbers for an exported history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistorySummary {
    pub scenario: String,
    pub first_date: Option<NaiveDate>,
    pub last_date: Option<NaiveDate>,
    pub initial_avg_trust: Option<f64>,
    pub final_avg_trust: Option<f64>,
    pub min_avg_trust: Option<f64>,
    pub peak_evacuated_fraction: Option<f64>,
    pub events_fired: usize,
    pub false_alarms: u32,
    pub missed_alarms: u32,
    pub communication: CommunicationStats,
}
