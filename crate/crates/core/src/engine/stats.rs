use serde::{Deserialize, Serialize};

use crate::agent::Resident;
use crate::colour::{PerColour, VigilanceColour};
use crate::scenario::ColourScale;

/// Snapshot of the population panel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationStats {
    pub avg_trust: f64,
    /// Change in average trust caused by the most recent observation.
    pub trust_delta: f64,
    /// Mean blended expectation (mm) formed at the latest alert.
    pub avg_expected_rain: f64,
    /// Share whose expectation fell below the actual rain of the alert day.
    pub unaware_fraction: f64,
    pub evacuated_fraction: f64,
    /// Mean personal estimate per colour, cold-start fallback included.
    pub per_colour_avg_subjective_risk: PerColour<f64>,
}

impl PopulationStats {
    /// `objective_rain` is the true rain for the day the current
    /// expectations refer to, when known.
    pub fn compute(
        population: &[Resident],
        scale: &ColourScale,
        objective_rain: Option<f64>,
        trust_delta: f64,
    ) -> Self {
        let n = population.len().max(1) as f64;
        let mut trust = 0.0;
        let mut expected = 0.0;
        let mut with_expectation = 0usize;
        let mut unaware = 0usize;
        let mut evacuated = 0usize;
        let mut subjective = PerColour::<f64>::default();
        for r in population {
            trust += r.trust();
            if let Some(e) = r.last_expected_rain() {
                expected += e;
                with_expectation += 1;
                if objective_rain.is_some_and(|obs| e < obs) {
                    unaware += 1;
                }
            }
            if r.evacuated() {
                evacuated += 1;
            }
            for c in VigilanceColour::ALL {
                subjective[c] += r.subjective_risk(c, scale.band_midpoint(c));
            }
        }
        Self {
            avg_trust: trust / n,
            trust_delta,
            avg_expected_rain: if with_expectation == 0 {
                0.0
            } else {
                expected / with_expectation as f64
            },
            unaware_fraction: unaware as f64 / n,
            evacuated_fraction: evacuated as f64 / n,
            per_colour_avg_subjective_risk: subjective.map(|s| s / n),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColourCounts {
    pub days_announced: u32,
    pub false_alarms: u32,
    pub missed_alarms: u32,
}

/// The communication panel: per-colour announcement outcomes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommunicationStats {
    pub days_played: u32,
    pub per_colour: PerColour<ColourCounts>,
}

impl CommunicationStats {
    pub fn record(&mut self, announced: VigilanceColour, classification: super::Classification) {
        self.days_played += 1;
        let counts = &mut self.per_colour[announced];
        counts.days_announced += 1;
        match classification {
            super::Classification::Correct => {}
            super::Classification::FalseAlarm => counts.false_alarms += 1,
            super::Classification::Missed => counts.missed_alarms += 1,
        }
    }

    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a super::DayRecord>) -> Self {
        let mut stats = Self::default();
        for r in records {
            stats.record(r.announced, r.classification);
        }
        stats
    }

    pub fn total_false_alarms(&self) -> u32 {
        self.per_colour.iter().map(|(_, c)| c.false_alarms).sum()
    }

    pub fn total_missed_alarms(&self) -> u32 {
        self.per_colour.iter().map(|(_, c)| c.missed_alarms).sum()
    }
}
