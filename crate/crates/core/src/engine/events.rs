//! Institutional reactions and flood damage, fired by data-driven rules.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::PopulationStats;
use crate::colour::VigilanceColour;
use crate::error::ConfigError;
use crate::scenario::ColourScale;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventCategory {
    Institutional,
    Damage,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "when", rename_all = "snake_case", deny_unknown_fields)]
pub enum Trigger {
    AnnouncedAtLeast { colour: VigilanceColour },
    ObservedAtLeast { mm: f64 },
    AvgTrustBelow { value: f64 },
}

impl Trigger {
    fn fires(&self, announced: VigilanceColour, observed: f64, stats: &PopulationStats) -> bool {
        match *self {
            Trigger::AnnouncedAtLeast { colour } => announced >= colour,
            Trigger::ObservedAtLeast { mm } => observed >= mm,
            Trigger::AvgTrustBelow { value } => stats.avg_trust < value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventRule {
    pub id: String,
    pub message: String,
    pub category: EventCategory,
    pub trigger: Trigger,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriggeredEvent {
    pub id: String,
    pub message: String,
    pub category: EventCategory,
}

/// School closures on Orange and above, flood damage from the Red lower
/// bound, and a bridge collapse from twice that.
pub fn default_event_rules(scale: &ColourScale) -> Vec<EventRule> {
    let red = scale.lower_bound(VigilanceColour::Red);
    let rule = |id: &str, message: &str, category, trigger| EventRule {
        id: id.into(),
        message: message.into(),
        category,
        trigger,
    };
    vec![
        rule(
            "schools_closed",
            "Schools closed",
            EventCategory::Institutional,
            Trigger::AnnouncedAtLeast {
                colour: VigilanceColour::Orange,
            },
        ),
        rule(
            "school_buses_stopped",
            "School buses stopped",
            EventCategory::Institutional,
            Trigger::AnnouncedAtLeast {
                colour: VigilanceColour::Orange,
            },
        ),
        rule(
            "roads_flooded",
            "Roads flooded",
            EventCategory::Damage,
            Trigger::ObservedAtLeast { mm: red },
        ),
        rule(
            "bridge_collapsed",
            "Bridge collapsed",
            EventCategory::Damage,
            Trigger::ObservedAtLeast { mm: 2.0 * red },
        ),
    ]
}

pub fn validate_rules(rules: &[EventRule]) -> Result<(), ConfigError> {
    let mut seen = HashSet::new();
    for (i, r) in rules.iter().enumerate() {
        if r.id.is_empty() {
            return Err(ConfigError::field(format!("events[{i}].id"), "must not be empty"));
        }
        if !seen.insert(r.id.as_str()) {
            return Err(ConfigError::field(format!("events[{i}].id"), format!("duplicate rule id {:?}", r.id)));
        }
        match r.trigger {
            Trigger::ObservedAtLeast { mm } if !(mm.is_finite() && mm >= 0.0) => {
                return Err(ConfigError::field(format!("events[{i}].trigger.mm"), "must be >= 0"));
            }
            Trigger::AvgTrustBelow { value } if !(0.0..=1.0).contains(&value) => {
                return Err(ConfigError::field(format!("events[{i}].trigger.value"), "must be in [0, 1]"));
            }
            _ => {}
        }
    }
    Ok(())
}

/// Events for one day, in rule order; each rule fires at most once.
pub fn evaluate_rules(
    rules: &[EventRule],
    announced: VigilanceColour,
    observed: f64,
    stats: &PopulationStats,
) -> Vec<TriggeredEvent> {
    rules
        .iter()
        .filter(|r| r.trigger.fires(announced, observed, stats))
        .map(|r| TriggeredEvent {
            id: r.id.clone(),
            message: r.message.clone(),
            category: r.category,
        })
        .collect()
}
