use std::cell::RefCell;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{
    sfr_schedule, DvmConfig, DvmState, EventKind, EventLog, LocalizationFix, LocalizationSource, MadrdConfig,
    MadrdState, MaintState, Query, Response, TriggerMode,
};
use crate::error::{check, Result};
use crate::geom::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    Maint,
    Madrd,
    Sfr,
    Dvm,
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProtocolKind::Maint => "maint",
            ProtocolKind::Madrd => "madrd",
            ProtocolKind::Sfr => "sfr",
            ProtocolKind::Dvm => "dvm",
        })
    }
}

/// A fully configured scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Protocol {
    Maint { period: f64, mode: TriggerMode },
    Madrd(MadrdConfig),
    Sfr { period: f64 },
    Dvm(DvmConfig),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Answer {
    pub query: Query,
    pub estimate: Vec2,
    /// When the requester learned the estimate.
    pub answered_at: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProtocolRun {
    pub answers: Vec<Answer>,
    /// Queries still buffered when the span ended (MAINT only).
    pub unanswered: Vec<Query>,
    pub fixes: Vec<LocalizationFix>,
}

impl ProtocolRun {
    /// Energy spent: one unit per localization.
    pub fn calls(&self) -> u64 {
        self.fixes.len() as u64
    }
}

impl Protocol {
    pub fn kind(&self) -> ProtocolKind {
        match self {
            Protocol::Maint { .. } => ProtocolKind::Maint,
            Protocol::Madrd(_) => ProtocolKind::Madrd,
            Protocol::Sfr { .. } => ProtocolKind::Sfr,
            Protocol::Dvm(_) => ProtocolKind::Dvm,
        }
    }

    /// Short description of the swept parameter, e.g. `T=10`.
    pub fn setting(&self) -> String {
        match self {
            Protocol::Maint { period, .. } | Protocol::Sfr { period } => format!("T={period}"),
            Protocol::Madrd(c) => format!("base={}", c.base_interval),
            Protocol::Dvm(c) => format!("threshold={}", c.threshold_distance),
        }
    }

    /// Runs the scheme over `[0, span]`, starting with a fix at `t = 0`, and
    /// answers `queries` (any order; each must lie in `[0, span]`).
    pub fn run<S: LocalizationSource>(
        &self,
        source: &mut S,
        span: f64,
        queries: &[Query],
        log: Option<&mut EventLog>,
    ) -> Result<ProtocolRun> {
        check("span", span, span > 0.0, "> 0")?;
        for q in queries {
            check("query.time", q.time, (0.0..=span).contains(&q.time), "in [0, span]")?;
        }
        let mut sorted = queries.to_vec();
        sorted.sort_by(|a, b| a.time.total_cmp(&b.time));
        let mut sink = Recorder {
            log,
            run: ProtocolRun::default(),
        };
        match *self {
            Protocol::Maint { period, mode } => run_maint(source, span, period, mode, &sorted, &mut sink)?,
            Protocol::Madrd(cfg) => run_madrd(source, span, cfg, &sorted, &mut sink)?,
            Protocol::Sfr { period } => run_sfr(source, span, period, &sorted, &mut sink)?,
            Protocol::Dvm(cfg) => run_dvm(source, span, cfg, &sorted, &mut sink)?,
        }
        Ok(sink.run)
    }
}

struct Recorder<'a> {
    log: Option<&'a mut EventLog>,
    run: ProtocolRun,
}

impl Recorder<'_> {
    fn query(&mut self, q: &Query) {
        if let Some(log) = self.log.as_deref_mut() {
            log.push(q.time, EventKind::Query, Some(q.requester.0), None);
        }
    }

    fn fix(&mut self, fix: LocalizationFix) {
        if let Some(log) = self.log.as_deref_mut() {
            log.push(fix.time, EventKind::Localization, None, Some(fix.pos));
        }
        self.run.fixes.push(fix);
    }

    fn answer(&mut self, query: Query, estimate: Vec2, answered_at: f64) {
        if let Some(log) = self.log.as_deref_mut() {
            log.push(
                answered_at,
                EventKind::Response,
                Some(query.requester.0),
                Some(estimate),
            );
        }
        self.run.answers.push(Answer {
            query,
            estimate,
            answered_at,
        });
    }

    fn responses(&mut self, responses: Vec<Response>) -> Result<()> {
        if let Some(fix) = responses.first().map(|r| r.fix_b) {
            debug_assert_eq!(self.run.fixes.last(), Some(&fix));
        }
        for r in responses {
            let est = r.estimate()?;
            self.answer(r.query, est, r.fix_b.time);
        }
        Ok(())
    }
}

fn run_maint<S: LocalizationSource>(
    source: &mut S,
    span: f64,
    period: f64,
    mode: TriggerMode,
    queries: &[Query],
    sink: &mut Recorder<'_>,
) -> Result<()> {
    let mut state = MaintState::start(source, 0.0, period, mode)?;
    sink.fix(state.last_fix());
    let ticks: Vec<f64> = match mode {
        TriggerMode::TimerDriven => sfr_schedule(period, span)?.into_iter().skip(1).collect(),
        TriggerMode::QueryDriven => Vec::new(),
    };
    let mut ticks = ticks.into_iter().peekable();
    for q in queries {
        // A query arriving exactly on a tick is bracketed by that tick.
        while let Some(&tick) = ticks.peek() {
            if tick >= q.time {
                break;
            }
            ticks.next();
            let out = state.on_timer(source, tick)?;
            sink.fix(state.last_fix());
            sink.responses(out)?;
        }
        sink.query(q);
        let before = state.calls();
        let out = state.on_query(*q, source, q.time)?;
        if state.calls() > before {
            sink.fix(state.last_fix());
        }
        sink.responses(out)?;
    }
    for tick in ticks {
        let out = state.on_timer(source, tick)?;
        sink.fix(state.last_fix());
        sink.responses(out)?;
    }
    sink.run.unanswered = state.pending().to_vec();
    debug_assert_eq!(state.calls(), sink.run.calls());
    Ok(())
}

/// Shared driver for schemes that answer immediately from past fixes.
/// `next_fix` yields the next localization time given the fixes so far.
fn run_immediate<S, N, A>(
    source: &mut S,
    span: f64,
    queries: &[Query],
    sink: &mut Recorder<'_>,
    mut next_fix: N,
    mut answer: A,
) -> Result<()>
where
    S: LocalizationSource,
    N: FnMut(&[LocalizationFix]) -> Result<f64>,
    A: FnMut(&[LocalizationFix], f64) -> Result<Vec2>,
{
    sink.fix(source.localize(0.0)?);
    let mut queries = queries.iter().peekable();
    loop {
        let next = next_fix(&sink.run.fixes)?;
        // Fixes come before queries at the same instant.
        while let Some(q) = queries.next_if(|q| q.time < next || next > span) {
            sink.query(q);
            let est = answer(&sink.run.fixes, q.time)?;
            sink.answer(*q, est, q.time);
        }
        if next > span {
            break;
        }
        sink.fix(source.localize(next)?);
    }
    Ok(())
}

fn run_sfr<S: LocalizationSource>(
    source: &mut S,
    span: f64,
    period: f64,
    queries: &[Query],
    sink: &mut Recorder<'_>,
) -> Result<()> {
    let schedule = sfr_schedule(period, span)?;
    run_immediate(
        source,
        span,
        queries,
        sink,
        |fixes| Ok(schedule.get(fixes.len()).copied().unwrap_or(f64::INFINITY)),
        |fixes, _| Ok(fixes.last().expect("initial fix").pos),
    )
}

fn run_dvm<S: LocalizationSource>(
    source: &mut S,
    span: f64,
    cfg: DvmConfig,
    queries: &[Query],
    sink: &mut Recorder<'_>,
) -> Result<()> {
    cfg.validate()?;
    let mut state: Option<DvmState> = None;
    run_immediate(
        source,
        span,
        queries,
        sink,
        |fixes| {
            let last = *fixes.last().expect("initial fix");
            if fixes.len() == 1 {
                return Ok(last.time + cfg.initial_interval);
            }
            match state.as_mut() {
                None => state = Some(DvmState::new(fixes[fixes.len() - 2], last, cfg)?),
                Some(s) => s.on_localization(last)?,
            }
            Ok(last.time + state.as_ref().expect("state set above").next_interval())
        },
        |fixes, _| Ok(fixes.last().expect("initial fix").pos),
    )
}

fn run_madrd<S: LocalizationSource>(
    source: &mut S,
    span: f64,
    cfg: MadrdConfig,
    queries: &[Query],
    sink: &mut Recorder<'_>,
) -> Result<()> {
    cfg.validate()?;
    let state: RefCell<Option<MadrdState>> = RefCell::new(None);
    run_immediate(
        source,
        span,
        queries,
        sink,
        |fixes| {
            let last = *fixes.last().expect("initial fix");
            if fixes.len() == 1 {
                return Ok(last.time + cfg.base_interval);
            }
            let mut state = state.borrow_mut();
            match state.as_mut() {
                None => *state = Some(MadrdState::new(fixes[fixes.len() - 2], last, cfg)?),
                Some(s) => {
                    s.on_localization(last)?;
                }
            }
            Ok(last.time + state.as_ref().expect("state set above").next_interval())
        },
        |fixes, t| match state.borrow().as_ref() {
            Some(s) => s.predict(t),
            // No velocity estimate before the second fix.
            None => Ok(fixes[0].pos),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobility::{generate_trajectory, ModelParams, Trajectory};
    use crate::protocols::ExactFixes;

    fn queries(times: &[f64]) -> Vec<Query> {
        times
            .iter()
            .enumerate()
            .map(|(i, &t)| Query::new(t, i as u64))
            .collect()
    }

    #[test]
    fn timer_maint_call_count() {
        let traj = generate_trajectory(&ModelParams::baseline(), 0).unwrap();
        for (period, expect) in [(25.0, 5), (30.0, 4), (100.0, 2), (7.0, 15), (1.0, 101)] {
            let p = Protocol::Maint {
                period,
                mode: TriggerMode::TimerDriven,
            };
            let run = p.run(&mut ExactFixes(&traj), 100.0, &[], None).unwrap();
            assert_eq!(run.calls(), expect, "T={period}");
            assert_eq!(run.calls(), (100.0f64 / period).floor() as u64 + 1);
        }
    }

    #[test]
    fn timer_maint_answers_with_bracketing_fixes() {
        let traj = generate_trajectory(&ModelParams::baseline(), 1).unwrap();
        let p = Protocol::Maint {
            period: 20.0,
            mode: TriggerMode::TimerDriven,
        };
        let qs = queries(&[3.0, 20.0, 55.5, 99.0, 100.0]);
        let mut log = EventLog::new();
        let run = p.run(&mut ExactFixes(&traj), 100.0, &qs, Some(&mut log)).unwrap();
        assert!(run.unanswered.is_empty());
        assert_eq!(run.answers.len(), 5);
        for a in &run.answers {
            let k = (a.query.time / 20.0).ceil().max(1.0);
            assert_eq!(a.answered_at, k * 20.0);
        }
        // Fix-time queries get the fix itself.
        let at20 = run.answers.iter().find(|a| a.query.time == 20.0).unwrap();
        assert_eq!(at20.estimate, traj.position_at(20.0).unwrap());
        assert_eq!(log.count(EventKind::Localization) as u64, run.calls());
        assert_eq!(log.count(EventKind::Query), 5);
        assert_eq!(log.count(EventKind::Response), 5);
    }

    #[test]
    fn query_driven_maint_leaves_tail_pending() {
        let traj = generate_trajectory(&ModelParams::baseline(), 2).unwrap();
        let p = Protocol::Maint {
            period: 30.0,
            mode: TriggerMode::QueryDriven,
        };
        let run = p
            .run(&mut ExactFixes(&traj), 100.0, &queries(&[10.0, 35.0, 50.0]), None)
            .unwrap();
        assert_eq!(run.calls(), 2);
        assert_eq!(run.answers.len(), 2);
        assert_eq!(run.unanswered.len(), 1);
        assert_eq!(run.unanswered[0].time, 50.0);
    }

    #[test]
    fn sfr_never_uses_future_fixes() {
        let traj = generate_trajectory(&ModelParams::baseline(), 3).unwrap();
        let qs = queries(&[0.0, 24.9, 25.0, 60.0, 100.0]);
        let run = Protocol::Sfr { period: 25.0 }
            .run(&mut ExactFixes(&traj), 100.0, &qs, None)
            .unwrap();
        assert_eq!(run.calls(), 5);
        let at = |t: f64| run.answers.iter().find(|a| a.query.time == t).unwrap().estimate;
        assert_eq!(at(24.9), Vec2::ZERO);
        assert_eq!(at(25.0), traj.position_at(25.0).unwrap());
        assert_eq!(at(60.0), traj.position_at(50.0).unwrap());
    }

    #[test]
    fn sfr_stationary_sensor_has_zero_error_same_cost() {
        let still = Trajectory::stationary(100.0).unwrap();
        let qs = queries(&[1.0, 33.0, 77.7]);
        let run = Protocol::Sfr { period: 25.0 }
            .run(&mut ExactFixes(&still), 100.0, &qs, None)
            .unwrap();
        assert_eq!(run.calls(), 5);
        assert!(run.answers.iter().all(|a| a.estimate == Vec2::ZERO));
    }

    #[test]
    fn madrd_exact_on_straight_line() {
        let traj = Trajectory::from_segments([(Vec2::new(2.0, -1.0), 200.0)], 100.0).unwrap();
        let qs = queries(&[5.0, 17.3, 64.0, 99.9]);
        let run = Protocol::Madrd(MadrdConfig::with_base(5.0))
            .run(&mut ExactFixes(&traj), 100.0, &qs, None)
            .unwrap();
        for a in &run.answers {
            assert!(a.estimate.distance(traj.position_at(a.query.time).unwrap()) < 1e-9);
        }
        // Interval doubles after each perfect prediction up to its cap of 20.
        let times: Vec<f64> = run.fixes.iter().map(|f| f.time).collect();
        assert_eq!(times, vec![0.0, 5.0, 10.0, 20.0, 40.0, 60.0, 80.0, 100.0]);
    }

    #[test]
    fn madrd_and_dvm_intervals_within_clamps() {
        let params = ModelParams::baseline();
        for rep in 0..20 {
            let traj = generate_trajectory(&params, rep).unwrap();
            let cfg = MadrdConfig::with_base(3.0);
            let run = Protocol::Madrd(cfg)
                .run(&mut ExactFixes(&traj), 100.0, &[], None)
                .unwrap();
            for w in run.fixes.windows(2).skip(1) {
                let gap = w[1].time - w[0].time;
                assert!(gap >= cfg.min_interval - 1e-12 && gap <= cfg.max_interval + 1e-12);
            }
            let dcfg = DvmConfig::default();
            let run = Protocol::Dvm(dcfg)
                .run(&mut ExactFixes(&traj), 100.0, &[], None)
                .unwrap();
            for w in run.fixes.windows(2).skip(1) {
                let gap = w[1].time - w[0].time;
                assert!(gap >= dcfg.min_interval - 1e-12 && gap <= dcfg.max_interval + 1e-12);
            }
        }
    }

    #[test]
    fn dvm_answers_with_last_fix() {
        let traj = generate_trajectory(&ModelParams::baseline(), 4).unwrap();
        let qs = queries(&[0.5, 42.0]);
        let run = Protocol::Dvm(DvmConfig::default())
            .run(&mut ExactFixes(&traj), 100.0, &qs, None)
            .unwrap();
        for a in &run.answers {
            let fix = run.fixes.iter().rev().find(|f| f.time <= a.query.time).unwrap();
            assert_eq!(a.estimate, fix.pos);
        }
    }

    #[test]
    fn rejects_queries_outside_span() {
        let traj = Trajectory::stationary(10.0).unwrap();
        let r = Protocol::Sfr { period: 1.0 }.run(&mut ExactFixes(&traj), 10.0, &queries(&[11.0]), None);
        assert!(r.is_err());
    }
}
