//! Scripted communicators for headless runs.

use std::str::FromStr;
use std::sync::Arc;

use chrono::NaiveDate;

use super::{EngineSettings, GameSession, PopulationStats, SessionHistory};
use crate::colour::VigilanceColour;
use crate::error::EngineError;
use crate::population::PopulationConfig;
use crate::scenario::{ColourScale, Scenario};

/// What a communicator can see when choosing a colour.
#[derive(Debug, Clone, Copy)]
pub struct PolicyInput<'a> {
    pub date: NaiveDate,
    pub forecast_rain_mm: f64,
    pub forecast_confidence: f64,
    pub stats: &'a PopulationStats,
    pub scale: &'a ColourScale,
    /// Colour issued on this date in the archives, when replaying.
    pub historical_colour: Option<VigilanceColour>,
    /// The day's real rain; only filled for policies that ask for it.
    pub truth_mm: Option<f64>,
}

pub trait Policy {
    fn choose(&self, input: &PolicyInput<'_>) -> VigilanceColour;

    /// Test-only hook: policies returning true see the real rain.
    fn needs_truth(&self) -> bool {
        false
    }
}

impl<F> Policy for F
where
    F: Fn(&PolicyInput<'_>) -> VigilanceColour,
{
    fn choose(&self, input: &PolicyInput<'_>) -> VigilanceColour {
        self(input)
    }
}

/// Built-in policies selectable by name from the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedPolicy {
    /// Colour of the forecast amount.
    Forecast,
    /// Colour of the forecast inflated by its uncertainty: `f * (2 - confidence)`.
    Cautious,
    /// Replays the archived colour; falls back to `Forecast` when absent.
    Historical,
    /// Colour of the real rain.
    Oracle,
    Always(VigilanceColour),
}

impl NamedPolicy {
    pub const NAMES: &'static [&'static str] = &[
        "forecast",
        "cautious",
        "historical",
        "oracle",
        "always-green",
        "always-yellow",
        "always-orange",
        "always-red",
    ];
}

impl FromStr for NamedPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "forecast" => NamedPolicy::Forecast,
            "cautious" => NamedPolicy::Cautious,
            "historical" => NamedPolicy::Historical,
            "oracle" => NamedPolicy::Oracle,
            other => match other.strip_prefix("always-").map(str::parse) {
                Some(Ok(c)) => NamedPolicy::Always(c),
                _ => {
                    return Err(format!(
                        "unknown policy {other:?} (expected one of {})",
                        NamedPolicy::NAMES.join(", ")
                    ))
                }
            },
        })
    }
}

impl Policy for NamedPolicy {
    fn choose(&self, input: &PolicyInput<'_>) -> VigilanceColour {
        match *self {
            NamedPolicy::Forecast => input.scale.colour_for(input.forecast_rain_mm),
            NamedPolicy::Cautious => input
                .scale
                .colour_for(input.forecast_rain_mm * (2.0 - input.forecast_confidence)),
            NamedPolicy::Historical => input
                .historical_colour
                .unwrap_or_else(|| input.scale.colour_for(input.forecast_rain_mm)),
            NamedPolicy::Oracle => input
                .scale
                .colour_for(input.truth_mm.expect("oracle policy is granted the truth")),
            NamedPolicy::Always(c) => c,
        }
    }

    fn needs_truth(&self) -> bool {
        matches!(self, NamedPolicy::Oracle)
    }
}

/// Plays a whole scenario with `policy` choosing every colour.
pub fn run_policy(
    scenario: Arc<Scenario>,
    population: &PopulationConfig,
    settings: EngineSettings,
    policy: &dyn Policy,
) -> Result<SessionHistory, EngineError> {
    let session = GameSession::new(scenario, population, settings)?;
    play_out(session, policy)
}

/// Plays the remaining days of an existing session.
pub fn play_out(mut session: GameSession, policy: &dyn Policy) -> Result<SessionHistory, EngineError> {
    while let Some(day) = session.current_day() {
        let input = PolicyInput {
            date: day.date,
            forecast_rain_mm: day.forecast_rain_mm,
            forecast_confidence: day.forecast_confidence,
            stats: session.latest_stats(),
            scale: session.scenario().scale(),
            historical_colour: day.historical_colour,
            truth_mm: policy.needs_truth().then_some(day.observed_rain_mm),
        };
        let colour = policy.choose(&input);
        session.announce(colour)?;
        session.advance()?;
    }
    Ok(session.history().clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_names() {
        for name in NamedPolicy::NAMES {
            assert!(name.parse::<NamedPolicy>().is_ok(), "{name}");
        }
        assert_eq!(
            "always-red".parse::<NamedPolicy>().unwrap(),
            NamedPolicy::Always(VigilanceColour::Red)
        );
        assert!("always-blue".parse::<NamedPolicy>().is_err());
        assert!("random".parse::<NamedPolicy>().is_err());
    }
}
