//! The daily game loop.
//!
//! A [`GameSession`] alternates between two phases. In
//! [`Phase::AwaitingColour`] the communicator sees the forecast for the
//! current day and announces a colour; residents form expectations and may
//! evacuate. In [`Phase::AwaitingAdvance`] the day's rain is revealed:
//! residents update trust, remember the rain under the announced colour and
//! may evacuate late. The alarm is classified, events fire, and the session
//! moves to the next day.

mod events;
mod history;
mod policy;
mod stats;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::agent::{Resident, TrustParams};
use crate::colour::VigilanceColour;
use crate::error::{ConfigError, EngineError};
use crate::population::PopulationConfig;
use crate::scenario::{ColourScale, Scenario, ScenarioDay};

pub use events::{default_event_rules, evaluate_rules, validate_rules, EventCategory, EventRule, Trigger, TriggeredEvent};
pub use history::{DayRecord, HistorySummary, SessionHistory, HISTORY_SCHEMA_VERSION};
pub use policy::{play_out, run_policy, NamedPolicy, Policy, PolicyInput};
pub use stats::{ColourCounts, CommunicationStats, PopulationStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    AwaitingColour,
    AwaitingAdvance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Correct,
    FalseAlarm,
    Missed,
}

/// Compares the announced colour with the band of the observed rain.
pub fn classify_alarm(scale: &ColourScale, announced: VigilanceColour, observed: f64) -> Classification {
    let actual = scale.colour_for(observed);
    match announced.cmp(&actual) {
        std::cmp::Ordering::Equal => Classification::Correct,
        std::cmp::Ordering::Greater => Classification::FalseAlarm,
        std::cmp::Ordering::Less => Classification::Missed,
    }
}

pub const DEFAULT_RESET_AFTER_GREEN_DAYS: u32 = 2;

/// Everything about a session that is not the scenario or the population.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineSettings {
    pub trust: TrustParams,
    pub event_rules: Vec<EventRule>,
    /// Evacuees return home after this many consecutive Green-band days;
    /// 0 keeps them out for the whole session.
    pub reset_after_green_days: u32,
}

impl EngineSettings {
    pub fn new(trust: TrustParams, scale: &ColourScale) -> Self {
        Self {
            trust,
            event_rules: default_event_rules(scale),
            reset_after_green_days: DEFAULT_RESET_AFTER_GREEN_DAYS,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.trust.validate()?;
        validate_rules(&self.event_rules)
    }
}

/// Result of revealing one day.
#[derive(Debug, Clone, PartialEq)]
pub struct DayOutcome {
    pub record: DayRecord,
    pub events: Vec<TriggeredEvent>,
    /// No days remain; the session only accepts reads from now on.
    pub complete: bool,
}

#[derive(Debug, Clone)]
pub struct GameSession {
    scenario: Arc<Scenario>,
    population: Vec<Resident>,
    settings: EngineSettings,
    day_index: usize,
    phase: Phase,
    current_colour: Option<VigilanceColour>,
    alert_stats: Option<PopulationStats>,
    latest_stats: PopulationStats,
    history: SessionHistory,
    green_streak: u32,
}

impl GameSession {
    pub fn new(
        scenario: Arc<Scenario>,
        population: &PopulationConfig,
        settings: EngineSettings,
    ) -> Result<Self, EngineError> {
        let residents = population.sample_population()?;
        Self::with_population(scenario, residents, settings)
    }

    /// Starts a session over an explicit population.
    pub fn with_population(
        scenario: Arc<Scenario>,
        population: Vec<Resident>,
        settings: EngineSettings,
    ) -> Result<Self, EngineError> {
        if scenario.is_empty() {
            return Err(crate::error::ScenarioError::Empty.into());
        }
        if population.is_empty() {
            return Err(ConfigError::field("population.size", "must be >= 1").into());
        }
        settings.validate()?;
        let latest_stats = PopulationStats::compute(&population, scenario.scale(), None, 0.0);
        let history = SessionHistory::new(scenario.name());
        Ok(Self {
            scenario,
            population,
            settings,
            day_index: 0,
            phase: Phase::AwaitingColour,
            current_colour: None,
            alert_stats: None,
            latest_stats,
            history,
            green_streak: 0,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn population(&self) -> &[Resident] {
        &self.population
    }

    pub fn settings(&self) -> &EngineSettings {
        &self.settings
    }

    pub fn day_index(&self) -> usize {
        self.day_index
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn is_complete(&self) -> bool {
        self.day_index >= self.scenario.len()
    }

    /// Colour announced for the day being played, once set.
    pub fn current_colour(&self) -> Option<VigilanceColour> {
        self.current_colour
    }

    /// The day awaiting a colour or a reveal; `None` once complete.
    pub fn current_day(&self) -> Option<&ScenarioDay> {
        self.scenario.days().get(self.day_index)
    }

    pub fn latest_stats(&self) -> &PopulationStats {
        &self.latest_stats
    }

    pub fn history(&self) -> &SessionHistory {
        &self.history
    }

    pub fn communication_stats(&self) -> CommunicationStats {
        CommunicationStats::from_records(&self.history.records)
    }

    fn expect_phase(&self, expected: Phase) -> Result<(), EngineError> {
        if self.is_complete() {
            return Err(EngineError::Completed);
        }
        if self.phase != expected {
            return Err(EngineError::Protocol {
                expected,
                actual: self.phase,
            });
        }
        Ok(())
    }

    /// Residents react to the announced colour. Every resident forms an
    /// expectation (evacuees still follow the news); those not yet
    /// evacuated decide whether to leave.
    pub fn announce(&mut self, colour: VigilanceColour) -> Result<PopulationStats, EngineError> {
        self.expect_phase(Phase::AwaitingColour)?;
        let scale = *self.scenario.scale();
        let official = scale.official_risk(colour);
        let fallback = scale.band_midpoint(colour);
        for r in &mut self.population {
            let expected = r.form_expectation(colour, official, fallback);
            r.evacuate_if(expected);
        }
        let truth = self.scenario.days()[self.day_index].observed_rain_mm;
        let stats = PopulationStats::compute(&self.population, &scale, Some(truth), self.latest_stats.trust_delta);
        self.current_colour = Some(colour);
        self.alert_stats = Some(stats);
        self.latest_stats = stats;
        self.phase = Phase::AwaitingAdvance;
        Ok(stats)
    }

    /// Reveals the day's rain and moves to the next day.
    pub fn advance(&mut self) -> Result<DayOutcome, EngineError> {
        self.expect_phase(Phase::AwaitingAdvance)?;
        let day = self.scenario.days()[self.day_index].clone();
        let colour = self.current_colour.expect("colour set in AwaitingAdvance");
        let scale = *self.scenario.scale();
        let observed = day.observed_rain_mm;
        let trust_before = self.latest_stats.avg_trust;

        for r in &mut self.population {
            r.update_trust(observed, &self.settings.trust)?;
            r.record_observation(colour, observed);
            r.evacuate_if(observed);
        }

        if scale.colour_for(observed) == VigilanceColour::Green {
            self.green_streak += 1;
        } else {
            self.green_streak = 0;
        }
        let reset = self.settings.reset_after_green_days;
        if reset > 0 && self.green_streak >= reset {
            self.population.iter_mut().for_each(Resident::return_home);
        }

        let mut stats = PopulationStats::compute(&self.population, &scale, Some(observed), 0.0);
        stats.trust_delta = stats.avg_trust - trust_before;
        let classification = classify_alarm(&scale, colour, observed);
        let events = evaluate_rules(&self.settings.event_rules, colour, observed, &stats);
        let record = DayRecord {
            date: day.date,
            forecast_rain_mm: day.forecast_rain_mm,
            forecast_confidence: day.forecast_confidence,
            announced: colour,
            observed_rain_mm: observed,
            classification,
            events: events.clone(),
            post_alert: self.alert_stats.take().expect("alert stats set in AwaitingAdvance"),
            post_observation: stats,
        };
        self.history.records.push(record.clone());
        self.latest_stats = stats;
        self.day_index += 1;
        self.phase = Phase::AwaitingColour;
        self.current_colour = None;
        Ok(DayOutcome {
            record,
            events,
            complete: self.is_complete(),
        })
    }
}
