use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mobility::ModelParams;
use crate::protocols::ProtocolKind;

/// The reproducible experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentId {
    /// Error against localization count, MAINT vs the baselines.
    Fig4,
    /// Simulated vs closed-form error over the localization period.
    Fig5,
    /// Constant `T / lambda` sweep approaching the asymptote.
    Fig6,
    /// Monte Carlo checks of the conditional and unconditional moments.
    Moments,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 4] = [
        ExperimentId::Fig4,
        ExperimentId::Fig5,
        ExperimentId::Fig6,
        ExperimentId::Moments,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentId::Fig4 => "fig4",
            ExperimentId::Fig5 => "fig5",
            ExperimentId::Fig6 => "fig6",
            ExperimentId::Moments => "moments",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

/// Settings for the moment-validation suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentConfig {
    /// Window length for the conditional checks.
    pub tau: f64,
    /// Largest conditioned waypoint count.
    pub n_max: u32,
    /// Draws per check.
    pub samples: usize,
    /// Evaluation times for the unconditional `E(X^2)` check.
    pub second_moment_times: Vec<f64>,
    /// Waypoint rates for the unconditional `E(X^2)` check.
    pub second_moment_rates: Vec<f64>,
    /// `(t, T)` pairs for the `E(X X')` check, at the model's rate.
    pub cross_moment_points: Vec<[f64; 2]>,
    /// Minimum accepted draws before a rejection-sampled check counts.
    pub min_accepted: usize,
}

impl Default for MomentConfig {
    fn default() -> Self {
        MomentConfig {
            tau: 10.0,
            n_max: 6,
            samples: 100_000,
            second_moment_times: vec![1.0, 5.0, 10.0, 20.0, 50.0],
            second_moment_rates: vec![0.05, 0.1, 0.5],
            cross_moment_points: vec![[5.0, 10.0], [2.0, 10.0], [10.0, 100.0], [25.0, 100.0], [50.0, 100.0]],
            min_accepted: 1_000,
        }
    }
}

/// Everything an experiment needs. Field names double as config-file keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelParams,
    pub protocols: Vec<ProtocolKind>,
    /// Localization periods for MAINT (and SFR in the count sweep).
    pub t_values: Vec<f64>,
    pub replications: usize,
    pub queries_per_replication: usize,
    /// Fixed `C = T / lambda` for the asymptotic sweep.
    pub ratio_c: Option<f64>,
    pub madrd_base_intervals: Vec<f64>,
    pub madrd_e_thresh: f64,
    pub madrd_min_interval: f64,
    pub dvm_thresholds: Vec<f64>,
    pub moments: MomentConfig,
}

fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step).round() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}

impl ExperimentConfig {
    /// Default settings for `id`.
    pub fn defaults(id: ExperimentId) -> Self {
        let base = ExperimentConfig {
            model: ModelParams::baseline(),
            protocols: vec![ProtocolKind::Maint],
            t_values: grid(20.0, 200.0, 20.0),
            replications: 100,
            queries_per_replication: 20,
            ratio_c: None,
            madrd_base_intervals: vec![2.0, 5.0, 10.0, 15.0, 20.0, 30.0, 40.0, 50.0],
            madrd_e_thresh: 5.0,
            madrd_min_interval: 0.1,
            dvm_thresholds: vec![2.0, 5.0, 10.0, 20.0],
            moments: MomentConfig::default(),
        };
        match id {
            ExperimentId::Fig4 => ExperimentConfig {
                protocols: vec![ProtocolKind::Maint, ProtocolKind::Madrd],
                // Divisors of the 100 s span, so every query is bracketed.
                t_values: vec![1.0, 2.0, 4.0, 5.0, 10.0, 20.0, 25.0, 50.0, 100.0],
                replications: 10_000,
                queries_per_replication: 1,
                ..base
            },
            ExperimentId::Fig5 => base,
            ExperimentId::Fig6 => ExperimentConfig {
                model: ModelParams {
                    sigma: 10.0,
                    ..ModelParams::baseline()
                },
                ratio_c: Some(50.0),
                ..base
            },
            ExperimentId::Moments => base,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.replications < 1 {
            return Err(Error::Config("replications must be >= 1".into()));
        }
        if self.queries_per_replication < 1 {
            return Err(Error::Config("queries_per_replication must be >= 1".into()));
        }
        if self.t_values.iter().any(|&t| !(t.is_finite() && t > 0.0)) {
            return Err(Error::Config("t_values must be positive".into()));
        }
        if let Some(c) = self.ratio_c {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::Config("ratio_c must be positive".into()));
            }
        }
        if self
            .madrd_base_intervals
            .iter()
            .chain(&self.dvm_thresholds)
            .any(|&v| !(v.is_finite() && v > 0.0))
        {
            return Err(Error::Config("sweep values must be positive".into()));
        }
        Ok(())
    }

    /// Reads a TOML file's keys over the defaults for `id`.
    pub fn from_toml_over_defaults(id: ExperimentId, text: &str) -> Result<Self> {
        let overrides: toml::Table = text.parse().map_err(|e| Error::Config(format!("{e}")))?;
        Self::defaults(id).merged(overrides)
    }

    /// Applies `overrides` (possibly nested tables) and re-validates.
    pub fn merged(&self, overrides: toml::Table) -> Result<Self> {
        let mut table = toml::Table::try_from(self).map_err(|e| Error::Config(e.to_string()))?;
        merge(&mut table, overrides);
        let cfg: ExperimentConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Flattened `key=value` pairs (dotted keys for nested tables).
    pub fn metadata(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        if let Ok(table) = toml::Table::try_from(self) {
            flatten("", &table, &mut out);
        }
        out
    }
}

fn merge(base: &mut toml::Table, overrides: toml::Table) {
    for (key, value) in overrides {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(dst)), toml::Value::Table(src)) => merge(dst, src),
            (_, value) => {
                base.insert(key, value);
            }
        }
    }
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut Vec<(String, String)>) {
    for (key, value) in table {
        let name = if prefix.is_empty() {
            key.clone()
        } else {
            format!("{prefix}.{key}")
        };
        match value {
            toml::Value::Table(t) => flatten(&name, t, out),
            v => out.push((name, v.to_string())),
        }
    }
}
