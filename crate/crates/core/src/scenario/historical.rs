use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::ingest::{RainSeries, VigilanceSeries};
use super::{ColourScale, Provenance, Scenario, ScenarioDay};
use crate::error::{ConfigError, IngestError, ScenarioError};

/// Synthesizes the forecast a communicator would have seen, since the
/// archives only keep observed rain and announced colours.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForecastModel {
    /// Forecast equals the observation, confidence 1.
    Perfect,
    /// `forecast = observed * (1 + e)` with `e ~ N(0, spread)` drawn per
    /// day from `seed`, clamped to `e >= -1`; confidence `max(0, 1 - |e|)`.
    Noisy { spread: f64, seed: u64 },
}

impl ForecastModel {
    pub fn validate(&self) -> Result<(), ConfigError> {
        match *self {
            ForecastModel::Perfect => Ok(()),
            ForecastModel::Noisy { spread, .. } if spread.is_finite() && spread >= 0.0 => Ok(()),
            ForecastModel::Noisy { .. } => Err(ConfigError::field("forecast.spread", "must be >= 0")),
        }
    }

    /// `(forecast mm, confidence)` for day `index` with true rain `observed`.
    pub fn forecast(&self, index: usize, observed: f64) -> (f64, f64) {
        match *self {
            ForecastModel::Perfect => (observed, 1.0),
            ForecastModel::Noisy { spread, seed } => {
                let eps = if spread == 0.0 {
                    0.0
                } else {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(index as u64);
                    let normal = Normal::new(0.0, spread).expect("validated spread");
                    normal.sample(&mut rng).max(-1.0)
                };
                let forecast = round_to(observed * (1.0 + eps), 10.0).max(0.0);
                let confidence = round_to((1.0 - eps.abs()).max(0.0), 100.0);
                (forecast, confidence)
            }
        }
    }
}

fn round_to(x: f64, per_unit: f64) -> f64 {
    (x * per_unit).round() / per_unit
}

/// Joins observed rain with announced colours into a replayable scenario.
/// Every vigilance bulletin must fall inside the rain series' date range.
pub fn build_historical_scenario(
    name: impl Into<String>,
    rain: &RainSeries,
    vigilance: &VigilanceSeries,
    model: ForecastModel,
    scale: ColourScale,
) -> Result<Scenario, ScenarioError> {
    model.validate()?;
    if rain.is_empty() {
        return Err(IngestError::NoRows.into());
    }
    let outside: Vec<_> = vigilance
        .entries
        .keys()
        .copied()
        .filter(|d| *d < rain.start() || *d > rain.end())
        .collect();
    if !outside.is_empty() {
        return Err(IngestError::RangeMismatch { outside }.into());
    }
    let days = rain
        .records
        .iter()
        .enumerate()
        .map(|(i, &(date, observed))| {
            let (forecast, confidence) = model.forecast(i, observed);
            ScenarioDay {
                date,
                observed_rain_mm: observed,
                forecast_rain_mm: forecast,
                forecast_confidence: confidence,
                historical_colour: Some(vigilance.colour_on(date)),
            }
        })
        .collect();
    Scenario::new(name, scale, Provenance::Historical, days)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colour::VigilanceColour;
    use crate::scenario::ingest::{load_rain_series, load_vigilance_series};

    fn rain() -> RainSeries {
        load_rain_series("date,rain_mm\n2018-10-13,3.2\n2018-10-14,139.8\n2018-10-15,60.1\n".as_bytes()).unwrap()
    }

    fn vigilance() -> VigilanceSeries {
        load_vigilance_series("date,colour\n2018-10-14,orange\n2018-10-15,red\n".as_bytes()).unwrap()
    }

    #[test]
    fn perfect_forecast_is_identity() {
        let s = build_historical_scenario("t", &rain(), &vigilance(), ForecastModel::Perfect, ColourScale::default())
            .unwrap();
        for d in s.days() {
            assert_eq!(d.forecast_rain_mm, d.observed_rain_mm);
            assert_eq!(d.forecast_confidence, 1.0);
        }
        let oct14 = &s.days()[1];
        assert_eq!(oct14.observed_rain_mm, 139.8);
        assert_eq!(oct14.historical_colour, Some(VigilanceColour::Orange));
        assert_eq!(s.days()[0].historical_colour, Some(VigilanceColour::Green));
    }

    #[test]
    fn noisy_forecast_deterministic() {
        let model = ForecastModel::Noisy { spread: 0.3, seed: 11 };
        let a = build_historical_scenario("t", &rain(), &vigilance(), model, ColourScale::default()).unwrap();
        let b = build_historical_scenario("t", &rain(), &vigilance(), model, ColourScale::default()).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert!(a.days().iter().any(|d| d.forecast_rain_mm != d.observed_rain_mm));
        for d in a.days() {
            assert!(d.forecast_rain_mm >= 0.0 && (0.0..=1.0).contains(&d.forecast_confidence));
        }
    }

    #[test]
    fn confidence_decreases_with_error() {
        let model = ForecastModel::Noisy { spread: 0.4, seed: 5 };
        let mut pts: Vec<(f64, f64)> = (0..200)
            .map(|i| {
                let (f, c) = model.forecast(i, 100.0);
                ((f - 100.0).abs(), c)
            })
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in pts.windows(2) {
            assert!(w[1].1 <= w[0].1 + 0.011, "{w:?}");
        }
    }

    #[test]
    fn out_of_range_bulletins_listed() {
        let v = load_vigilance_series("date,colour\n2018-10-20,orange\n2018-10-21,red\n".as_bytes()).unwrap();
        let err = build_historical_scenario("t", &rain(), &v, ForecastModel::Perfect, ColourScale::default())
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("2018-10-20") && msg.contains("2018-10-21"), "{msg}");
    }

    #[test]
    fn negative_spread_rejected() {
        let model = ForecastModel::Noisy { spread: -0.1, seed: 0 };
        assert!(build_historical_scenario("t", &rain(), &vigilance(), model, ColourScale::default()).is_err());
    }
}
