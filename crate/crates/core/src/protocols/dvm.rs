use serde::{Deserialize, Serialize};

use super::LocalizationFix;
use crate::error::{check, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DvmConfig {
    /// Distance the sensor may cover before it localizes again.
    pub threshold_distance: f64,
    /// Gap between the first two fixes, before any speed is known.
    pub initial_interval: f64,
    pub min_interval: f64,
    pub max_interval: f64,
}

impl Default for DvmConfig {
    fn default() -> Self {
        DvmConfig {
            threshold_distance: 5.0,
            initial_interval: 1.0,
            min_interval: 0.1,
            max_interval: 100.0,
        }
    }
}

impl DvmConfig {
    pub fn validate(&self) -> Result<()> {
        check(
            "threshold_distance",
            self.threshold_distance,
            self.threshold_distance > 0.0,
            "> 0",
        )?;
        check("min_interval", self.min_interval, self.min_interval > 0.0, "> 0")?;
        check(
            "max_interval",
            self.max_interval,
            self.max_interval >= self.min_interval,
            ">= min_interval",
        )?;
        check(
            "initial_interval",
            self.initial_interval,
            self.initial_interval > 0.0,
            "> 0",
        )?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DvmState {
    pub fix_prev: LocalizationFix,
    pub fix_last: LocalizationFix,
    pub config: DvmConfig,
}

impl DvmState {
    pub fn new(fix_prev: LocalizationFix, fix_last: LocalizationFix, config: DvmConfig) -> Result<Self> {
        config.validate()?;
        if fix_prev.time >= fix_last.time {
            return Err(Error::DegeneratePair(fix_last.time));
        }
        Ok(DvmState {
            fix_prev,
            fix_last,
            config,
        })
    }

    /// Speed between the last two fixes.
    pub fn speed(&self) -> f64 {
        self.fix_last.pos.distance(self.fix_prev.pos) / (self.fix_last.time - self.fix_prev.time)
    }

    /// Time to cover the threshold distance at the recent speed, clamped.
    /// A stationary sensor waits the maximum interval.
    pub fn next_interval(&self) -> f64 {
        let speed = self.speed();
        if speed == 0.0 {
            return self.config.max_interval;
        }
        (self.config.threshold_distance / speed).clamp(self.config.min_interval, self.config.max_interval)
    }

    pub fn on_localization(&mut self, new_fix: LocalizationFix) -> Result<()> {
        if new_fix.time <= self.fix_last.time {
            return Err(Error::DegeneratePair(new_fix.time));
        }
        self.fix_prev = self.fix_last;
        self.fix_last = new_fix;
        Ok(())
    }
}
