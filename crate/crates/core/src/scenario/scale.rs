use serde::{Deserialize, Serialize};

use crate::colour::{PerColour, VigilanceColour};
use crate::error::ConfigError;

/// Daily rain bands (mm) for each colour plus the official risk value
/// residents are told to expect under that colour.
///
/// Bands are `[green_from = 0, yellow_from)`, `[yellow_from, orange_from)`,
/// `[orange_from, red_from)`, `[red_from, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScale", into = "RawScale")]
pub struct ColourScale {
    yellow_from: f64,
    orange_from: f64,
    red_from: f64,
    official_risk: PerColour<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScale {
    yellow_from_mm: f64,
    orange_from_mm: f64,
    red_from_mm: f64,
    official_risk_mm: PerColour<f64>,
}

impl TryFrom<RawScale> for ColourScale {
    type Error = ConfigError;

    fn try_from(raw: RawScale) -> Result<Self, Self::Error> {
        ColourScale::new(raw.yellow_from_mm, raw.orange_from_mm, raw.red_from_mm, raw.official_risk_mm)
    }
}

impl From<ColourScale> for RawScale {
    fn from(s: ColourScale) -> Self {
        RawScale {
            yellow_from_mm: s.yellow_from,
            orange_from_mm: s.orange_from,
            red_from_mm: s.red_from,
            official_risk_mm: s.official_risk,
        }
    }
}

impl Default for ColourScale {
    fn default() -> Self {
        Self::with_bounds(10.0, 50.0, 100.0).expect("default bounds are valid")
    }
}

impl ColourScale {
    pub fn new(
        yellow_from: f64,
        orange_from: f64,
        red_from: f64,
        official_risk: PerColour<f64>,
    ) -> Result<Self, ConfigError> {
        if !(yellow_from.is_finite() && orange_from.is_finite() && red_from.is_finite()) {
            return Err(ConfigError::field("scale", "band bounds must be finite"));
        }
        if !(0.0 < yellow_from && yellow_from < orange_from && orange_from < red_from) {
            return Err(ConfigError::field(
                "scale",
                "band bounds must satisfy 0 < yellow_from < orange_from < red_from",
            ));
        }
        let scale = Self {
            yellow_from,
            orange_from,
            red_from,
            official_risk,
        };
        for (colour, &risk) in official_risk.iter() {
            if !risk.is_finite() || scale.colour_for(risk.max(0.0)) != colour || risk < 0.0 {
                return Err(ConfigError::field(
                    format!("scale.official_risk_mm.{colour}"),
                    format!("{risk} mm lies outside the {colour} band"),
                ));
            }
        }
        Ok(scale)
    }

    /// Bands from the given bounds; official risk is the band midpoint
    /// (Red: 1.5 times its lower bound).
    pub fn with_bounds(yellow_from: f64, orange_from: f64, red_from: f64) -> Result<Self, ConfigError> {
        let official = PerColour::new(
            yellow_from / 2.0,
            (yellow_from + orange_from) / 2.0,
            (orange_from + red_from) / 2.0,
            red_from * 1.5,
        );
        Self::new(yellow_from, orange_from, red_from, official)
    }

    /// `(lower inclusive, upper exclusive)`; Red has no upper bound.
    pub fn band(&self, colour: VigilanceColour) -> (f64, Option<f64>) {
        match colour {
            VigilanceColour::Green => (0.0, Some(self.yellow_from)),
            VigilanceColour::Yellow => (self.yellow_from, Some(self.orange_from)),
            VigilanceColour::Orange => (self.orange_from, Some(self.red_from)),
            VigilanceColour::Red => (self.red_from, None),
        }
    }

    pub fn lower_bound(&self, colour: VigilanceColour) -> f64 {
        self.band(colour).0
    }

    pub fn official_risk(&self, colour: VigilanceColour) -> f64 {
        self.official_risk[colour]
    }

    /// Cold-start estimate for a colour never experienced: the band
    /// midpoint, or 1.5 times the lower bound for the open Red band.
    pub fn band_midpoint(&self, colour: VigilanceColour) -> f64 {
        match self.band(colour) {
            (lo, Some(hi)) => (lo + hi) / 2.0,
            (lo, None) => lo * 1.5,
        }
    }

    /// The unique colour whose band contains `rain_mm` (negative input is
    /// treated as zero).
    pub fn colour_for(&self, rain_mm: f64) -> VigilanceColour {
        if rain_mm >= self.red_from {
            VigilanceColour::Red
        } else if rain_mm >= self.orange_from {
            VigilanceColour::Orange
        } else if rain_mm >= self.yellow_from {
            VigilanceColour::Yellow
        } else {
            VigilanceColour::Green
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use VigilanceColour::*;

    #[test]
    fn default_scale_values() {
        let s = ColourScale::default();
        assert_eq!(s.band(Green), (0.0, Some(10.0)));
        assert_eq!(s.band(Yellow), (10.0, Some(50.0)));
        assert_eq!(s.band(Orange), (50.0, Some(100.0)));
        assert_eq!(s.band(Red), (100.0, None));
        let official: Vec<f64> = VigilanceColour::ALL.iter().map(|&c| s.official_risk(c)).collect();
        assert_eq!(official, vec![5.0, 30.0, 75.0, 150.0]);
    }

    #[test]
    fn colour_lookup() {
        let s = ColourScale::default();
        assert_eq!(s.colour_for(139.8), Red);
        assert_eq!(s.colour_for(0.0), Green);
        assert_eq!(s.colour_for(50.0), Orange);
        assert_eq!(s.colour_for(9.9), Green);
        assert_eq!(s.colour_for(100.0), Red);
        assert_eq!(s.colour_for(75.0), Orange);
    }

    #[test]
    fn rejects_bad_scales() {
        assert!(ColourScale::with_bounds(10.0, 10.0, 100.0).is_err());
        assert!(ColourScale::with_bounds(0.0, 50.0, 100.0).is_err());
        let err = ColourScale::new(10.0, 50.0, 100.0, PerColour::new(5.0, 30.0, 120.0, 150.0)).unwrap_err();
        assert_eq!(err.path(), Some("scale.official_risk_mm.orange"));
    }

    #[test]
    fn serde_validates() {
        let s = ColourScale::default();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<ColourScale>(&json).unwrap(), s);
        let bad = json.replace("\"red_from_mm\":100.0", "\"red_from_mm\":40.0");
        assert!(serde_json::from_str::<ColourScale>(&bad).is_err());
    }

    proptest! {
        #[test]
        fn bands_partition_rain(rain in 0.0f64..1000.0) {
            let s = ColourScale::default();
            let hits: Vec<_> = VigilanceColour::ALL
                .into_iter()
                .filter(|&c| {
                    let (lo, hi) = s.band(c);
                    rain >= lo && hi.is_none_or(|h| rain < h)
                })
                .collect();
            prop_assert_eq!(hits.len(), 1);
            prop_assert_eq!(hits[0], s.colour_for(rain));
        }

        #[test]
        fn official_risk_round_trips(y in 1.0f64..40.0, gap1 in 1.0f64..80.0, gap2 in 1.0f64..200.0) {
            let s = ColourScale::with_bounds(y, y + gap1, y + gap1 + gap2).unwrap();
            for c in VigilanceColour::ALL {
                prop_assert_eq!(s.colour_for(s.official_risk(c)), c);
            }
        }
    }
}
