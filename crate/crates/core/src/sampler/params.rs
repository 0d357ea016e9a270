use std::fmt;
use std::time::Duration;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::SolveError;

/// A count that is either picked by the engine or fixed by the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Setting {
    #[default]
    Auto,
    Fixed(usize),
}

impl Setting {
    pub fn resolve(self, auto: impl FnOnce() -> usize) -> usize {
        match self {
            Setting::Auto => auto(),
            Setting::Fixed(v) => v,
        }
    }
}

impl Serialize for Setting {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Setting::Auto => s.serialize_str("auto"),
            Setting::Fixed(v) => s.serialize_u64(*v as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Setting {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct SettingVisitor;

        impl Visitor<'_> for SettingVisitor {
            type Value = Setting;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("\"auto\" or a positive integer")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Setting, E> {
                Ok(Setting::Fixed(v as usize))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Setting, E> {
                usize::try_from(v).map(Setting::Fixed).map_err(|_| E::custom("expected a positive integer"))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Setting, E> {
                if v == "auto" {
                    Ok(Setting::Auto)
                } else {
                    v.parse().map(Setting::Fixed).map_err(|_| E::custom(format!("invalid setting '{v}'")))
                }
            }
        }

        d.deserialize_any(SettingVisitor)
    }
}

impl std::str::FromStr for Setting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(Setting::Auto);
        }
        s.parse().map(Setting::Fixed).map_err(|_| format!("expected 'auto' or an integer, got '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QualityBias {
    /// Run to the time limit even after progress stalls.
    #[default]
    Quality,
    /// Stop once no global improvement was seen for a fraction of the limit.
    Speed,
}

/// Sampler configuration. Every field has a default, so partial JSON
/// overrides deserialize cleanly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerParams {
    /// Wall-clock budget in seconds.
    pub time_limit: f64,
    /// Size of the returned pool.
    pub max_samples: usize,
    pub seed: u64,
    /// Concurrent tabu searches; `auto` is one per available core.
    pub num_starts: Setting,
    /// `auto` is `max(10, n / 20)`, jittered ±25% per move.
    pub tabu_tenure: Setting,
    /// Non-improving moves before a restart; `auto` is `max(5000, 10·n)`.
    pub stagnation_restart: Setting,
    pub no_progress_fraction: f64,
    pub quality_bias: QualityBias,
    /// Deterministic per-start move budget, in addition to the time limit.
    pub max_moves: Option<u64>,
}

impl Default for SamplerParams {
    fn default() -> Self {
        SamplerParams {
            time_limit: 1200.0,
            max_samples: 700,
            seed: 0,
            num_starts: Setting::Auto,
            tabu_tenure: Setting::Auto,
            stagnation_restart: Setting::Auto,
            no_progress_fraction: 0.25,
            quality_bias: QualityBias::Quality,
            max_moves: None,
        }
    }
}

impl SamplerParams {
    pub fn validate(&self) -> Result<(), SolveError> {
        let bad = |msg: String| Err(SolveError::InvalidParams(msg));
        if !(self.time_limit.is_finite() && self.time_limit > 0.0) {
            return bad(format!("time_limit must be positive, got {}", self.time_limit));
        }
        if self.max_samples == 0 {
            return bad("max_samples must be at least 1".into());
        }
        if !(self.no_progress_fraction > 0.0 && self.no_progress_fraction <= 1.0) {
            return bad(format!("no_progress_fraction must lie in (0, 1], got {}", self.no_progress_fraction));
        }
        for (name, setting) in [
            ("num_starts", self.num_starts),
            ("tabu_tenure", self.tabu_tenure),
            ("stagnation_restart", self.stagnation_restart),
        ] {
            if setting == Setting::Fixed(0) {
                return bad(format!("{name} must be positive"));
            }
        }
        Ok(())
    }

    pub fn time_budget(&self) -> Duration {
        Duration::from_secs_f64(self.time_limit)
    }

    pub fn resolved_starts(&self) -> usize {
        self.num_starts
            .resolve(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
    }

    pub fn resolved_tenure(&self, n: usize) -> usize {
        self.tabu_tenure.resolve(|| (n / 20).max(10))
    }

    pub fn resolved_stagnation(&self, n: usize) -> u64 {
        self.stagnation_restart.resolve(|| (10 * n).max(5000)) as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let p = SamplerParams::default();
        assert_eq!(p.time_limit, 1200.0);
        assert_eq!(p.max_samples, 700);
        assert_eq!(p.no_progress_fraction, 0.25);
        assert_eq!(p.quality_bias, QualityBias::Quality);
        assert_eq!(p.resolved_tenure(100), 10);
        assert_eq!(p.resolved_tenure(4000), 200);
        assert_eq!(p.resolved_stagnation(100), 5000);
        assert_eq!(p.resolved_stagnation(2000), 20_000);
        p.validate().unwrap();
    }

    #[test]
    fn validation() {
        let p = SamplerParams { time_limit: 0.0, ..Default::default() };
        assert!(p.validate().is_err());
        let p = SamplerParams { max_samples: 0, ..Default::default() };
        assert!(p.validate().is_err());
        let p = SamplerParams { no_progress_fraction: 1.5, ..Default::default() };
        assert!(p.validate().is_err());
        let p = SamplerParams { num_starts: Setting::Fixed(0), ..Default::default() };
        assert!(p.validate().is_err());
    }

    #[test]
    fn partial_json_overrides() {
        let p: SamplerParams =
            serde_json::from_str(r#"{"time_limit": 2.5, "num_starts": 1, "tabu_tenure": "auto"}"#).unwrap();
        assert_eq!(p.time_limit, 2.5);
        assert_eq!(p.num_starts, Setting::Fixed(1));
        assert_eq!(p.tabu_tenure, Setting::Auto);
        assert_eq!(p.max_samples, 700);
        assert!(serde_json::from_str::<SamplerParams>(r#"{"bogus": 1}"#).is_err());
        let back: SamplerParams = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
    }
}
