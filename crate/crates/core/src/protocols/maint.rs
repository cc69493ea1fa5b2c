use serde::{Deserialize, Serialize};

use super::{LocalizationFix, LocalizationSource, Query, Response};
use crate::error::{check, Error, Result};

/// When MAINT invokes localization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriggerMode {
    /// Only when a query arrives at least one period after the last fix.
    QueryDriven,
    /// Every period on a timer; queries are buffered until the next tick.
    TimerDriven,
}

/// Sensor-side MAINT state: the last fix and the deferred queries.
#[derive(Debug, Clone)]
pub struct MaintState {
    last_fix: LocalizationFix,
    period: f64,
    pending: Vec<Query>,
    immediate: bool,
    mode: TriggerMode,
    calls: u64,
}

impl MaintState {
    /// Starts from an initial fix, which is counted as one call.
    pub fn new(initial: LocalizationFix, period: f64, mode: TriggerMode) -> Result<Self> {
        check("period", period, period > 0.0, "> 0")?;
        Ok(MaintState {
            last_fix: initial,
            period,
            pending: Vec::new(),
            immediate: false,
            mode,
            calls: 1,
        })
    }

    /// Localizes at `t0` through `source` and starts from that fix.
    pub fn start<S: LocalizationSource>(source: &mut S, t0: f64, period: f64, mode: TriggerMode) -> Result<Self> {
        let fix = source.localize(t0)?;
        Self::new(fix, period, mode)
    }

    /// Answer every query as soon as it arrives (real-time requesters).
    pub fn set_immediate(&mut self, immediate: bool) {
        self.immediate = immediate;
    }

    pub fn last_fix(&self) -> LocalizationFix {
        self.last_fix
    }

    pub fn pending(&self) -> &[Query] {
        &self.pending
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn mode(&self) -> TriggerMode {
        self.mode
    }

    /// Localization calls so far, including the initial fix.
    pub fn calls(&self) -> u64 {
        self.calls
    }

    /// Buffers `q` (once per requester) and, if the trigger condition holds,
    /// localizes at `clock` and answers everything buffered.
    pub fn on_query<S: LocalizationSource>(&mut self, q: Query, source: &mut S, clock: f64) -> Result<Vec<Response>> {
        if q.time < self.last_fix.time || clock < self.last_fix.time {
            return Err(Error::StaleQuery {
                query: q.time,
                last_fix: self.last_fix.time,
            });
        }
        if !self.pending.iter().any(|p| p.requester == q.requester) {
            let at = self.pending.partition_point(|p| p.time <= q.time);
            self.pending.insert(at, q);
        }
        let due = match self.mode {
            TriggerMode::QueryDriven => clock >= self.last_fix.time + self.period,
            TriggerMode::TimerDriven => false,
        };
        if self.immediate || due {
            self.localize(source, clock)
        } else {
            Ok(Vec::new())
        }
    }

    /// Timer tick at `clock`; localizes and flushes the buffer.
    pub fn on_timer<S: LocalizationSource>(&mut self, source: &mut S, clock: f64) -> Result<Vec<Response>> {
        self.localize(source, clock)
    }

    fn localize<S: LocalizationSource>(&mut self, source: &mut S, clock: f64) -> Result<Vec<Response>> {
        if clock <= self.last_fix.time {
            // A fix at the same instant would give a zero-length bracket.
            return Err(Error::DegeneratePair(clock));
        }
        let fix = source.localize(clock)?;
        self.calls += 1;
        let previous = self.last_fix;
        let responses = self
            .pending
            .drain(..)
            .map(|query| Response {
                query,
                fix_a: previous,
                fix_b: fix,
            })
            .collect();
        self.last_fix = fix;
        Ok(responses)
    }
}
