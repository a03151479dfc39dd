//! Resident agents: subjective risk, trust-weighted expectations, trust
//! updates and the evacuation decision.
//!
//! Every operation here is a pure function of the resident's state and its
//! inputs. The engine drives them in a fixed order each day:
//! alert ([`Resident::form_expectation`], [`Resident::evacuate_if`]), then
//! observation ([`Resident::update_trust`], [`Resident::record_observation`]).

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::colour::{PerColour, VigilanceColour};
use crate::error::{AgentError, ConfigError};

/// How a resident turns remembered rain under a colour into an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RiskStrategy {
    /// Minimum remembered amount.
    Optimistic,
    /// Maximum remembered amount.
    Pessimistic,
    /// Arithmetic mean of remembered amounts.
    Rational,
    /// Most recent remembered amount.
    ShortMemory,
}

impl RiskStrategy {
    pub const ALL: [RiskStrategy; 4] = [
        RiskStrategy::Optimistic,
        RiskStrategy::Pessimistic,
        RiskStrategy::Rational,
        RiskStrategy::ShortMemory,
    ];

    /// Applies the strategy to a non-empty memory list (oldest first).
    /// Returns `None` for an empty list.
    pub fn evaluate<'a, I>(self, memory: I) -> Option<f64>
    where
        I: IntoIterator<Item = &'a f64>,
        I::IntoIter: DoubleEndedIterator + ExactSizeIterator,
    {
        let mut it = memory.into_iter();
        let len = it.len();
        if len == 0 {
            return None;
        }
        Some(match self {
            RiskStrategy::Optimistic => it.fold(f64::INFINITY, |a, &b| a.min(b)),
            RiskStrategy::Pessimistic => it.fold(f64::NEG_INFINITY, |a, &b| a.max(b)),
            RiskStrategy::Rational => it.sum::<f64>() / len as f64,
            RiskStrategy::ShortMemory => *it.next_back().expect("non-empty"),
        })
    }
}

/// Parameters of the asymmetric trust update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrustParams {
    /// Increment when the observation falls inside the tolerance band.
    pub gain_slight: f64,
    /// Loss per normalized mm of over-announcement beyond tolerance.
    pub loss_false_alarm_rate: f64,
    /// Loss per normalized mm of under-announcement beyond tolerance.
    pub loss_missed_rate: f64,
    /// Half-width (mm) of the band around the expectation counted as "as expected".
    pub surprise_tolerance_mm: f64,
    /// Severity normalizer (mm); defaults to the Red band lower bound.
    #[serde(default = "default_severity_scale")]
    pub severity_scale_mm: f64,
}

fn default_severity_scale() -> f64 {
    100.0
}

/// Upper bound on `gain_slight`; trust must rebuild slowly.
pub const MAX_GAIN_SLIGHT: f64 = 0.05;

impl Default for TrustParams {
    fn default() -> Self {
        Self {
            gain_slight: 0.02,
            loss_false_alarm_rate: 0.15,
            loss_missed_rate: 0.40,
            surprise_tolerance_mm: 10.0,
            severity_scale_mm: default_severity_scale(),
        }
    }
}

impl TrustParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let finite = |path: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::field(path, "must be a finite number"))
            }
        };
        finite("trust.gain_slight", self.gain_slight)?;
        finite("trust.loss_false_alarm_rate", self.loss_false_alarm_rate)?;
        finite("trust.loss_missed_rate", self.loss_missed_rate)?;
        finite("trust.surprise_tolerance_mm", self.surprise_tolerance_mm)?;
        finite("trust.severity_scale_mm", self.severity_scale_mm)?;
        if !(self.gain_slight > 0.0 && self.gain_slight <= MAX_GAIN_SLIGHT) {
            return Err(ConfigError::field(
                "trust.gain_slight",
                format!("must be in (0, {MAX_GAIN_SLIGHT}]"),
            ));
        }
        if self.loss_false_alarm_rate <= 0.0 {
            return Err(ConfigError::field("trust.loss_false_alarm_rate", "must be > 0"));
        }
        if self.loss_missed_rate <= self.loss_false_alarm_rate {
            return Err(ConfigError::field(
                "trust.loss_missed_rate",
                "must exceed loss_false_alarm_rate (missed events cost more trust)",
            ));
        }
        if self.surprise_tolerance_mm < 0.0 {
            return Err(ConfigError::field("trust.surprise_tolerance_mm", "must be >= 0"));
        }
        if self.severity_scale_mm <= 0.0 {
            return Err(ConfigError::field("trust.severity_scale_mm", "must be > 0"));
        }
        Ok(())
    }
}

/// Which way the observation surprised a resident.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Surprise {
    AsExpected,
    /// More rain than expected.
    UnderAnnounced,
    /// Less rain than expected.
    OverAnnounced,
}

/// Trust after one observation, given the expectation formed at alert time.
pub fn updated_trust(trust: f64, expected: f64, observed: f64, params: &TrustParams) -> (f64, Surprise) {
    let d = observed - expected;
    let excess = d.abs() - params.surprise_tolerance_mm;
    if excess <= 0.0 {
        return ((trust + params.gain_slight).min(1.0), Surprise::AsExpected);
    }
    let (rate, kind) = if d > 0.0 {
        (params.loss_missed_rate, Surprise::UnderAnnounced)
    } else {
        (params.loss_false_alarm_rate, Surprise::OverAnnounced)
    };
    let loss = rate * excess / params.severity_scale_mm;
    ((trust - loss).max(0.0), kind)
}

/// Trust-weighted combination of the official and the personal estimate.
pub fn blend(trust: f64, official: f64, subjective: f64) -> f64 {
    trust * official + (1.0 - trust) * subjective
}

/// One member of the simulated population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resident {
    pub id: u32,
    trust: f64,
    risk_aversion_threshold: f64,
    memory_depth: usize,
    strategy: RiskStrategy,
    memory: PerColour<VecDeque<f64>>,
    evacuated: bool,
    last_expected_rain: Option<f64>,
}

impl Resident {
    pub fn new(
        id: u32,
        trust: f64,
        risk_aversion_threshold: f64,
        memory_depth: usize,
        strategy: RiskStrategy,
    ) -> Result<Self, ConfigError> {
        if !(0.0..=1.0).contains(&trust) {
            return Err(ConfigError::field("resident.trust", "must be in [0, 1]"));
        }
        if !(risk_aversion_threshold.is_finite() && risk_aversion_threshold > 0.0) {
            return Err(ConfigError::field("resident.risk_aversion_threshold", "must be > 0"));
        }
        if memory_depth == 0 {
            return Err(ConfigError::field("resident.memory_depth", "must be >= 1"));
        }
        Ok(Self {
            id,
            trust,
            risk_aversion_threshold,
            memory_depth,
            strategy,
            memory: PerColour::default(),
            evacuated: false,
            last_expected_rain: None,
        })
    }

    pub fn trust(&self) -> f64 {
        self.trust
    }

    pub fn risk_aversion_threshold(&self) -> f64 {
        self.risk_aversion_threshold
    }

    pub fn memory_depth(&self) -> usize {
        self.memory_depth
    }

    pub fn strategy(&self) -> RiskStrategy {
        self.strategy
    }

    pub fn evacuated(&self) -> bool {
        self.evacuated
    }

    pub fn last_expected_rain(&self) -> Option<f64> {
        self.last_expected_rain
    }

    /// Remembered rain under `colour`, oldest first.
    pub fn memory(&self, colour: VigilanceColour) -> &VecDeque<f64> {
        &self.memory[colour]
    }

    /// Personal estimate of tomorrow's rain under `colour`; `fallback` is
    /// used when nothing is remembered for that colour.
    pub fn subjective_risk(&self, colour: VigilanceColour, fallback: f64) -> f64 {
        self.strategy
            .evaluate(&self.memory[colour])
            .unwrap_or(fallback)
    }

    /// Forms and stores the blended expectation for an alert.
    pub fn form_expectation(&mut self, colour: VigilanceColour, official_risk: f64, fallback: f64) -> f64 {
        let subjective = self.subjective_risk(colour, fallback);
        let expected = blend(self.trust, official_risk, subjective);
        self.last_expected_rain = Some(expected);
        expected
    }

    /// Updates trust against the stored expectation.
    pub fn update_trust(&mut self, observed_rain: f64, params: &TrustParams) -> Result<Surprise, AgentError> {
        let expected = self.last_expected_rain.ok_or(AgentError::NoExpectation { id: self.id })?;
        let (trust, surprise) = updated_trust(self.trust, expected, observed_rain, params);
        self.trust = trust;
        Ok(surprise)
    }

    /// Appends an observation under the announced colour, evicting the
    /// oldest entry past `memory_depth`.
    pub fn record_observation(&mut self, colour: VigilanceColour, observed_rain: f64) {
        let list = &mut self.memory[colour];
        list.push_back(observed_rain);
        while list.len() > self.memory_depth {
            list.pop_front();
        }
    }

    /// Whether the resident is (or would become) evacuated given `expected_rain`.
    pub fn decide_evacuation(&self, expected_rain: f64) -> bool {
        self.evacuated || expected_rain >= self.risk_aversion_threshold
    }

    /// Applies [`Resident::decide_evacuation`]; returns true if this call
    /// moved the resident out.
    pub fn evacuate_if(&mut self, expected_rain: f64) -> bool {
        if self.evacuated {
            return false;
        }
        self.evacuated = self.decide_evacuation(expected_rain);
        self.evacuated
    }

    /// End of an episode: the resident returns home.
    pub fn return_home(&mut self) {
        self.evacuated = false;
    }

    #[doc(hidden)]
    pub fn set_trust_for_test(&mut self, trust: f64) {
        self.trust = trust.clamp(0.0, 1.0);
    }

    #[doc(hidden)]
    pub fn set_expectation_for_test(&mut self, expected: f64) {
        self.last_expected_rain = Some(expected);
    }
}
