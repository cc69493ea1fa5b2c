use serde::{Deserialize, Serialize};

use super::{velocity_between, LocalizationFix};
use crate::error::{check, Error, Result};
use crate::geom::Vec2;

/// Parameters of the dead-reckoning scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MadrdConfig {
    /// Interval before the second fix and the starting adaptive interval.
    pub base_interval: f64,
    /// Prediction error above which localization speeds up.
    pub e_thresh: f64,
    pub min_interval: f64,
    pub max_interval: f64,
}

impl MadrdConfig {
    /// `e_thresh = 5`, intervals clamped to `[0.1, 4 * base_interval]`.
    pub fn with_base(base_interval: f64) -> Self {
        MadrdConfig {
            base_interval,
            e_thresh: 5.0,
            min_interval: 0.1,
            max_interval: 4.0 * base_interval,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check("e_thresh", self.e_thresh, self.e_thresh >= 0.0, ">= 0")?;
        check("min_interval", self.min_interval, self.min_interval > 0.0, "> 0")?;
        check(
            "max_interval",
            self.max_interval,
            self.max_interval >= self.min_interval,
            ">= min_interval",
        )?;
        check("base_interval", self.base_interval, self.base_interval > 0.0, "> 0")?;
        Ok(())
    }

    fn clamp(&self, interval: f64) -> f64 {
        interval.clamp(self.min_interval, self.max_interval)
    }
}

/// Last two fixes plus the adaptive localization interval.
#[derive(Debug, Clone, PartialEq)]
pub struct MadrdState {
    fix_prev: LocalizationFix,
    fix_last: LocalizationFix,
    velocity_est: Vec2,
    next_interval: f64,
    config: MadrdConfig,
}

impl MadrdState {
    pub fn new(fix_prev: LocalizationFix, fix_last: LocalizationFix, config: MadrdConfig) -> Result<Self> {
        config.validate()?;
        if fix_prev.time >= fix_last.time {
            return Err(Error::DegeneratePair(fix_last.time));
        }
        Ok(MadrdState {
            velocity_est: velocity_between(&fix_prev, &fix_last)?,
            fix_prev,
            fix_last,
            next_interval: config.clamp(config.base_interval),
            config,
        })
    }

    pub fn fix_prev(&self) -> LocalizationFix {
        self.fix_prev
    }

    pub fn fix_last(&self) -> LocalizationFix {
        self.fix_last
    }

    pub fn velocity_est(&self) -> Vec2 {
        self.velocity_est
    }

    pub fn next_interval(&self) -> f64 {
        self.next_interval
    }

    pub fn config(&self) -> &MadrdConfig {
        &self.config
    }

    /// Predicted position at `t_query >= fix_last.time`.
    pub fn predict(&self, t_query: f64) -> Result<Vec2> {
        extrapolate_madrd(self, t_query)
    }

    /// Folds in a fresh fix and returns the distance between it and the
    /// prediction for the same instant.
    ///
    /// The interval halves when that error exceeds `e_thresh`, doubles when
    /// it is below `e_thresh / 2`, and otherwise stays put.
    pub fn on_localization(&mut self, new_fix: LocalizationFix) -> Result<f64> {
        if new_fix.time <= self.fix_last.time {
            return Err(Error::DegeneratePair(new_fix.time));
        }
        let distance_error = self.predict(new_fix.time)?.distance(new_fix.pos);
        let thresh = self.config.e_thresh;
        let interval = if distance_error > thresh {
            self.next_interval / 2.0
        } else if distance_error < thresh / 2.0 {
            self.next_interval * 2.0
        } else {
            self.next_interval
        };
        self.next_interval = self.config.clamp(interval);
        self.velocity_est = velocity_between(&self.fix_last, &new_fix)?;
        self.fix_prev = self.fix_last;
        self.fix_last = new_fix;
        Ok(distance_error)
    }
}

/// Constant-velocity continuation from the last fix using the velocity
/// between the last two fixes.
pub fn extrapolate_madrd(state: &MadrdState, t_query: f64) -> Result<Vec2> {
    let last = state.fix_last;
    if t_query < last.time {
        return Err(Error::OutOfBracket {
            t: t_query,
            start: last.time,
            end: f64::INFINITY,
        });
    }
    if t_query == last.time {
        return Ok(last.pos);
    }
    Ok(last.pos + state.velocity_est * (t_query - last.time))
}
