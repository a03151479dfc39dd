//! Seeded sampling of heterogeneous residents.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::agent::{Resident, RiskStrategy};
use crate::error::ConfigError;

/// Real-valued distribution over a resident attribute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RealDist {
    Constant { value: f64 },
    /// Uniform over `[low, high]`.
    Uniform { low: f64, high: f64 },
}

impl RealDist {
    fn bounds(&self) -> (f64, f64) {
        match *self {
            RealDist::Constant { value } => (value, value),
            RealDist::Uniform { low, high } => (low, high),
        }
    }

    fn check(&self, path: &str, min: f64, min_inclusive: bool, max: f64) -> Result<(), ConfigError> {
        let (lo, hi) = self.bounds();
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(ConfigError::field(path, "bounds must be finite"));
        }
        if lo > hi {
            return Err(ConfigError::field(path, format!("low ({lo}) exceeds high ({hi})")));
        }
        let low_ok = if min_inclusive { lo >= min } else { lo > min };
        if !low_ok || hi > max {
            let open = if min_inclusive { "[" } else { "(" };
            return Err(ConfigError::field(
                path,
                format!("bounds [{lo}, {hi}] must lie within {open}{min}, {max}]"),
            ));
        }
        Ok(())
    }

    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        match *self {
            RealDist::Constant { value } => value,
            RealDist::Uniform { low, high } if low == high => low,
            RealDist::Uniform { low, high } => rng.random_range(low..=high),
        }
    }
}

/// Integer-valued distribution (inclusive bounds).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum IntDist {
    Constant { value: u32 },
    Uniform { low: u32, high: u32 },
}

impl IntDist {
    pub fn sample(&self, rng: &mut impl Rng) -> u32 {
        match *self {
            IntDist::Constant { value } => value,
            IntDist::Uniform { low, high } => rng.random_range(low..=high),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyWeights {
    pub optimistic: f64,
    pub pessimistic: f64,
    pub rational: f64,
    pub short_memory: f64,
}

impl Default for StrategyWeights {
    fn default() -> Self {
        Self {
            optimistic: 0.25,
            pessimistic: 0.25,
            rational: 0.25,
            short_memory: 0.25,
        }
    }
}

impl StrategyWeights {
    fn as_array(&self) -> [f64; 4] {
        [self.optimistic, self.pessimistic, self.rational, self.short_memory]
    }

    fn pick(&self, u: f64) -> RiskStrategy {
        let mut acc = 0.0;
        let weights = self.as_array();
        for (i, w) in weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return RiskStrategy::ALL[i];
            }
        }
        // u landed in the rounding slack above the cumulative sum
        let last = weights.iter().rposition(|&w| w > 0.0).unwrap_or(3);
        RiskStrategy::ALL[last]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationConfig {
    pub size: u32,
    pub seed: u64,
    pub trust_init: RealDist,
    pub threshold_mm: RealDist,
    pub memory_depth: IntDist,
    #[serde(default)]
    pub strategy_weights: StrategyWeights,
}

impl Default for PopulationConfig {
    fn default() -> Self {
        Self {
            size: 200,
            seed: 0,
            trust_init: RealDist::Uniform { low: 0.3, high: 0.9 },
            threshold_mm: RealDist::Uniform { low: 20.0, high: 120.0 },
            memory_depth: IntDist::Uniform { low: 1, high: 5 },
            strategy_weights: StrategyWeights::default(),
        }
    }
}

impl PopulationConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.size == 0 {
            return Err(ConfigError::field("population.size", "must be >= 1"));
        }
        self.trust_init.check("population.trust_init", 0.0, true, 1.0)?;
        self.threshold_mm
            .check("population.threshold_mm", 0.0, false, f64::MAX)?;
        let (lo, hi) = match self.memory_depth {
            IntDist::Constant { value } => (value, value),
            IntDist::Uniform { low, high } => (low, high),
        };
        if lo == 0 || lo > hi {
            return Err(ConfigError::field(
                "population.memory_depth",
                format!("bounds [{lo}, {hi}] must satisfy 1 <= low <= high"),
            ));
        }
        let w = self.strategy_weights.as_array();
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(ConfigError::field("population.strategy_weights", "weights must be >= 0"));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(ConfigError::field(
                "population.strategy_weights",
                format!("weights must sum to 1 (got {sum})"),
            ));
        }
        Ok(())
    }

    /// Samples resident `index`. The result depends only on `(seed, index)`
    /// and the distributions, never on which other residents were drawn.
    pub fn sample_resident(&self, index: u32) -> Result<Resident, ConfigError> {
        self.validate()?;
        if index >= self.size {
            return Err(ConfigError::field(
                "population.size",
                format!("resident index {index} out of range (size {})", self.size),
            ));
        }
        Ok(self.sample_unchecked(index))
    }

    fn sample_unchecked(&self, index: u32) -> Resident {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(u64::from(index));
        let trust = self.trust_init.sample(&mut rng);
        let threshold = self.threshold_mm.sample(&mut rng);
        let depth = self.memory_depth.sample(&mut rng) as usize;
        let strategy = self.strategy_weights.pick(rng.random::<f64>());
        Resident::new(index, trust, threshold, depth, strategy)
            .expect("validated distributions respect resident invariants")
    }

    pub fn sample_population(&self) -> Result<Vec<Resident>, ConfigError> {
        self.validate()?;
        Ok((0..self.size).map(|i| self.sample_unchecked(i)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_trust() {
        let cfg = PopulationConfig {
            trust_init: RealDist::Constant { value: 0.5 },
            ..Default::default()
        };
        assert_eq!(cfg.sample_resident(0).unwrap().trust(), 0.5);
    }

    #[test]
    fn deterministic_per_index() {
        let cfg = PopulationConfig {
            seed: 9,
            ..Default::default()
        };
        assert_eq!(cfg.sample_resident(17).unwrap(), cfg.sample_resident(17).unwrap());
        assert_eq!(cfg.sample_population().unwrap()[17], cfg.sample_resident(17).unwrap());
        assert_ne!(cfg.sample_resident(17).unwrap(), cfg.sample_resident(18).unwrap());
    }

    #[test]
    fn index_out_of_range() {
        let cfg = PopulationConfig {
            size: 3,
            ..Default::default()
        };
        assert!(cfg.sample_resident(3).is_err());
    }

    #[test]
    fn strategy_counts_roughly_even() {
        let cfg = PopulationConfig {
            size: 1000,
            seed: 42,
            ..Default::default()
        };
        let pop = cfg.sample_population().unwrap();
        for s in RiskStrategy::ALL {
            let n = pop.iter().filter(|r| r.strategy() == s).count();
            assert!((200..=300).contains(&n), "{s:?}: {n}");
        }
    }

    #[test]
    fn sampled_fields_in_bounds() {
        let cfg = PopulationConfig {
            size: 500,
            seed: 3,
            ..Default::default()
        };
        for r in cfg.sample_population().unwrap() {
            assert!((0.3..=0.9).contains(&r.trust()));
            assert!((20.0..=120.0).contains(&r.risk_aversion_threshold()));
            assert!((1..=5).contains(&r.memory_depth()));
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        let bad = [
            PopulationConfig {
                size: 0,
                ..Default::default()
            },
            PopulationConfig {
                trust_init: RealDist::Uniform { low: 0.2, high: 1.2 },
                ..Default::default()
            },
            PopulationConfig {
                threshold_mm: RealDist::Constant { value: 0.0 },
                ..Default::default()
            },
            PopulationConfig {
                memory_depth: IntDist::Uniform { low: 0, high: 3 },
                ..Default::default()
            },
            PopulationConfig {
                strategy_weights: StrategyWeights {
                    optimistic: 0.5,
                    pessimistic: 0.5,
                    rational: 0.5,
                    short_memory: 0.0,
                },
                ..Default::default()
            },
        ];
        for cfg in bad {
            let err = cfg.sample_resident(0).unwrap_err();
            assert!(err.path().unwrap().starts_with("population."), "{err}");
        }
    }

    #[test]
    fn zero_weight_strategy_never_drawn() {
        let cfg = PopulationConfig {
            size: 400,
            strategy_weights: StrategyWeights {
                optimistic: 0.0,
                pessimistic: 0.0,
                rational: 1.0,
                short_memory: 0.0,
            },
            ..Default::default()
        };
        assert!(cfg
            .sample_population()
            .unwrap()
            .iter()
            .all(|r| r.strategy() == RiskStrategy::Rational));
    }
}
