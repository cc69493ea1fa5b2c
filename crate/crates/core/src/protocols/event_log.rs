use std::fmt;
use std::io::Write;

use crate::error::Result;
use crate::geom::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Query,
    Localization,
    Response,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::Query => "query",
            EventKind::Localization => "localization",
            EventKind::Response => "response",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogEvent {
    pub time: f64,
    pub kind: EventKind,
    /// Absent for localizations.
    pub requester: Option<u64>,
    /// Fix position for localizations, estimate for responses, absent for queries.
    pub pos: Option<Vec2>,
}

/// Ordered record of what a protocol did; written as
/// `time,event_kind,requester,x,y`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventLog {
    events: Vec<LogEvent>,
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, time: f64, kind: EventKind, requester: Option<u64>, pos: Option<Vec2>) {
        self.events.push(LogEvent {
            time,
            kind,
            requester,
            pos,
        });
    }

    pub fn events(&self) -> &[LogEvent] {
        &self.events
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["time", "event_kind", "requester", "x", "y"])?;
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        for e in &self.events {
            w.write_record(&[
                e.time.to_string(),
                e.kind.to_string(),
                e.requester.map(|r| r.to_string()).unwrap_or_default(),
                opt(e.pos.map(|p| p.x)),
                opt(e.pos.map(|p| p.y)),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
