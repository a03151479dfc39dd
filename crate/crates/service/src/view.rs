use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use vigilsim::engine::{CommunicationStats, DayRecord, PopulationStats, TriggeredEvent};
use vigilsim::{GameSession, Phase, VigilanceColour};

pub const STATE_VIEW_SCHEMA_VERSION: u32 = 1;

/// Read-only projection of a session, as shown on the dashboard.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateView {
    pub schema_version: u32,
    pub scenario: String,
    pub day_index: usize,
    pub total_days: usize,
    pub phase: Phase,
    pub complete: bool,
    pub weather: WeatherView,
    pub population: PopulationStats,
    pub communication: CommunicationStats,
    /// Events fired by the most recent advance, shown as popups until the
    /// next announcement.
    pub pending_events: Vec<TriggeredEvent>,
    pub last_record: Option<DayRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeatherView {
    /// The day being played; absent once the scenario is finished.
    pub date: Option<NaiveDate>,
    pub forecast_rain_mm: Option<f64>,
    pub forecast_confidence: Option<f64>,
    pub current_colour: Option<VigilanceColour>,
    /// Rain revealed on the previous day.
    pub last_observed: Option<Observation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub date: NaiveDate,
    pub rain_mm: f64,
}

impl StateView {
    pub fn project(session: &GameSession, pending_events: &[TriggeredEvent]) -> Self {
        let day = session.current_day();
        let last_record = session.history().records.last().cloned();
        StateView {
            schema_version: STATE_VIEW_SCHEMA_VERSION,
            scenario: session.scenario().name().to_string(),
            day_index: session.day_index(),
            total_days: session.scenario().len(),
            phase: session.phase(),
            complete: session.is_complete(),
            weather: WeatherView {
                date: day.map(|d| d.date),
                forecast_rain_mm: day.map(|d| d.forecast_rain_mm),
                forecast_confidence: day.map(|d| d.forecast_confidence),
                current_colour: session.current_colour(),
                last_observed: last_record.as_ref().map(|r| Observation {
                    date: r.date,
                    rain_mm: r.observed_rain_mm,
                }),
            },
            population: *session.latest_stats(),
            communication: session.communication_stats(),
            pending_events: pending_events.to_vec(),
            last_record,
        }
    }
}
