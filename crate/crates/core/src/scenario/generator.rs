//! Generated teaching scenarios built from short day templates.

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ColourScale, Provenance, Scenario, ScenarioDay};
use crate::error::{ConfigError, ScenarioError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateKind {
    /// Light rain, forecast close to the truth.
    QuietStretch,
    /// Forecast in the Orange band or above, observed Green.
    FalseAlarmCluster,
    /// Forecast Green, observed Red.
    SurpriseFlood,
    /// Heavy rain that was forecast correctly.
    ForecastStorm,
    /// Yellow-band showers under a low-confidence forecast.
    UncertainShowers,
}

impl TemplateKind {
    /// Whether a generated day satisfies this template's contract.
    pub fn satisfied_by(self, day: &ScenarioDay, scale: &ColourScale) -> bool {
        let yellow = scale.lower_bound(crate::VigilanceColour::Yellow);
        let orange = scale.lower_bound(crate::VigilanceColour::Orange);
        let red = scale.lower_bound(crate::VigilanceColour::Red);
        let (obs, fc) = (day.observed_rain_mm, day.forecast_rain_mm);
        match self {
            TemplateKind::QuietStretch => obs < yellow && fc < yellow,
            TemplateKind::FalseAlarmCluster => fc >= orange && obs < yellow,
            TemplateKind::SurpriseFlood => fc < yellow && obs >= red,
            TemplateKind::ForecastStorm => {
                obs >= orange && scale.colour_for(fc) == scale.colour_for(obs)
            }
            TemplateKind::UncertainShowers => {
                obs >= yellow && obs < orange && day.forecast_confidence <= 0.6
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Template {
    pub kind: TemplateKind,
    pub days: u32,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ordering {
    /// Template blocks in the listed order.
    #[default]
    Sequential,
    /// Template blocks permuted by the seed; each block stays contiguous.
    Shuffled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub name: String,
    pub start_date: NaiveDate,
    pub templates: Vec<Template>,
    #[serde(default)]
    pub ordering: Ordering,
    #[serde(default)]
    pub scale: ColourScale,
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.templates.is_empty() {
            return Err(ConfigError::field("templates", "at least one template is required"));
        }
        for (i, t) in self.templates.iter().enumerate() {
            if t.days == 0 {
                return Err(ConfigError::field(format!("templates[{i}].days"), "must be >= 1"));
            }
        }
        Ok(())
    }

    /// Template kind of each generated day, in scenario order, for a given seed.
    pub fn day_kinds(&self, seed: u64) -> Vec<TemplateKind> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.block_order(&mut rng)
            .into_iter()
            .flat_map(|t| std::iter::repeat_n(t.kind, t.days as usize))
            .collect()
    }

    fn block_order(&self, rng: &mut ChaCha8Rng) -> Vec<Template> {
        let mut blocks = self.templates.clone();
        if self.ordering == Ordering::Shuffled {
            blocks.shuffle(rng);
        }
        blocks
    }
}

/// Uniform draw over multiples of 0.1 mm in `[lo, hi)`.
fn tenths(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    let lo_t = (lo * 10.0).ceil() as i64;
    let hi_t = ((hi * 10.0).ceil() as i64 - 1).max(lo_t);
    rng.random_range(lo_t..=hi_t) as f64 / 10.0
}

fn hundredths(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    let v = rng.random_range(lo..=hi);
    (v * 100.0).round() / 100.0
}

fn sample_day(kind: TemplateKind, date: NaiveDate, scale: &ColourScale, rng: &mut ChaCha8Rng) -> ScenarioDay {
    let yellow = scale.lower_bound(crate::VigilanceColour::Yellow);
    let orange = scale.lower_bound(crate::VigilanceColour::Orange);
    let red = scale.lower_bound(crate::VigilanceColour::Red);
    let (observed, forecast, confidence) = match kind {
        TemplateKind::QuietStretch => {
            let obs = tenths(rng, 0.0, yellow * 0.5);
            let fc = tenths(rng, 0.0, yellow * 0.5);
            (obs, fc, hundredths(rng, 0.8, 0.95))
        }
        TemplateKind::FalseAlarmCluster => {
            let fc = tenths(rng, orange, red * 1.2);
            let obs = tenths(rng, 0.0, yellow);
            (obs, fc, hundredths(rng, 0.5, 0.8))
        }
        TemplateKind::SurpriseFlood => {
            let fc = tenths(rng, 0.0, yellow);
            let obs = tenths(rng, red, red * 2.0);
            (obs, fc, hundredths(rng, 0.5, 0.9))
        }
        TemplateKind::ForecastStorm => {
            let obs = tenths(rng, orange, red * 2.0);
            let colour = scale.colour_for(obs);
            let (lo, hi) = scale.band(colour);
            let hi = hi.unwrap_or(red * 2.0);
            (obs, tenths(rng, lo, hi), hundredths(rng, 0.7, 0.95))
        }
        TemplateKind::UncertainShowers => {
            let obs = tenths(rng, yellow, orange);
            let fc = tenths(rng, 0.0, orange);
            (obs, fc, hundredths(rng, 0.3, 0.6))
        }
    };
    ScenarioDay {
        date,
        observed_rain_mm: observed,
        forecast_rain_mm: forecast,
        forecast_confidence: confidence,
        historical_colour: None,
    }
}

pub fn generate_pedagogical_scenario(seed: u64, config: &GeneratorConfig) -> Result<Scenario, ScenarioError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks = config.block_order(&mut rng);
    let mut days = Vec::new();
    let mut date = config.start_date;
    for block in blocks {
        for _ in 0..block.days {
            days.push(sample_day(block.kind, date, &config.scale, &mut rng));
            date = date.succ_opt().expect("date in range");
        }
    }
    Scenario::new(config.name.clone(), config.scale, Provenance::Generated { seed }, days)
}
