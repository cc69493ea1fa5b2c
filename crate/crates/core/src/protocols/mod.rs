//! Localization-control schemes.
//!
//! Each scheme decides when the sensor invokes its localization primitive
//! and how a position query is answered in between. Every invocation is a
//! unit of energy, so `calls` on each state is the energy metric.
//!
//! The per-scheme state machines ([`MaintState`], [`MadrdState`],
//! [`DvmState`], [`sfr_schedule`]) can be driven by hand; [`Protocol::run`]
//! drives one over a whole trajectory for a batch of queries.

mod dvm;
mod event_log;
mod madrd;
mod maint;
mod runner;
mod sfr;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{check, Error, Result};
use crate::geom::Vec2;
use crate::mobility::Trajectory;

pub use dvm::{DvmConfig, DvmState};
pub use event_log::{EventKind, EventLog, LogEvent};
pub use madrd::{extrapolate_madrd, MadrdConfig, MadrdState};
pub use maint::{MaintState, TriggerMode};
pub use runner::{Answer, Protocol, ProtocolKind, ProtocolRun};
pub use sfr::{sfr_answer, sfr_schedule};

/// A position obtained from the localization primitive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizationFix {
    pub time: f64,
    pub pos: Vec2,
}

impl LocalizationFix {
    pub fn new(time: f64, pos: impl Into<Vec2>) -> Self {
        LocalizationFix { time, pos: pos.into() }
    }
}

/// Opaque identity of whoever asked for the sensor's position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RequesterId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub time: f64,
    pub requester: RequesterId,
}

impl Query {
    pub fn new(time: f64, requester: u64) -> Self {
        Query {
            time,
            requester: RequesterId(requester),
        }
    }
}

/// The two fixes sent back to a deferred query; the receiver interpolates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Response {
    pub query: Query,
    pub fix_a: LocalizationFix,
    pub fix_b: LocalizationFix,
}

impl Response {
    pub fn estimate(&self) -> Result<Vec2> {
        interpolate(&self.fix_a, &self.fix_b, self.query.time)
    }
}

fn velocity_between(a: &LocalizationFix, b: &LocalizationFix) -> Result<Vec2> {
    let dt = b.time - a.time;
    if dt == 0.0 {
        return Err(Error::DegeneratePair(a.time));
    }
    Ok((b.pos - a.pos) * (1.0 / dt))
}

/// Position at `t_query` on the straight line through two fixes, with
/// `fix_a.time <= t_query <= fix_b.time`.
pub fn interpolate(fix_a: &LocalizationFix, fix_b: &LocalizationFix, t_query: f64) -> Result<Vec2> {
    if fix_a.time == fix_b.time {
        return Err(Error::DegeneratePair(fix_a.time));
    }
    if !(fix_a.time..=fix_b.time).contains(&t_query) {
        return Err(Error::OutOfBracket {
            t: t_query,
            start: fix_a.time,
            end: fix_b.time,
        });
    }
    if t_query == fix_a.time {
        return Ok(fix_a.pos);
    }
    if t_query == fix_b.time {
        return Ok(fix_b.pos);
    }
    let velocity = velocity_between(fix_a, fix_b)?;
    Ok(fix_a.pos + velocity * (t_query - fix_a.time))
}

/// Where fixes come from. Each call is one localization.
pub trait LocalizationSource {
    fn localize(&mut self, t: f64) -> Result<LocalizationFix>;
}

/// Noiseless fixes read off the true trajectory.
#[derive(Debug, Clone, Copy)]
pub struct ExactFixes<'a>(pub &'a Trajectory);

impl LocalizationSource for ExactFixes<'_> {
    fn localize(&mut self, t: f64) -> Result<LocalizationFix> {
        Ok(LocalizationFix::new(t, self.0.position_at(t)?))
    }
}

/// Fixes perturbed by isotropic Gaussian noise with per-axis std dev `sigma`.
pub struct NoisyFixes<'a, R> {
    truth: &'a Trajectory,
    noise: Normal<f64>,
    rng: R,
}

impl<'a, R: Rng> NoisyFixes<'a, R> {
    pub fn new(truth: &'a Trajectory, sigma: f64, rng: R) -> Result<Self> {
        check("noise_sigma", sigma, sigma >= 0.0, ">= 0")?;
        let noise = Normal::new(0.0, sigma).map_err(|e| Error::param("noise_sigma", e.to_string()))?;
        Ok(NoisyFixes { truth, noise, rng })
    }
}

impl<R: Rng> LocalizationSource for NoisyFixes<'_, R> {
    fn localize(&mut self, t: f64) -> Result<LocalizationFix> {
        let pos = self.truth.position_at(t)?;
        let jitter = Vec2::new(self.noise.sample(&mut self.rng), self.noise.sample(&mut self.rng));
        Ok(LocalizationFix::new(t, pos + jitter))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobility::{generate_trajectory, ModelParams};

    #[test]
    fn interpolate_midpoint_and_endpoints() {
        let a = LocalizationFix::new(0.0, (0.0, 0.0));
        let b = LocalizationFix::new(10.0, (10.0, 20.0));
        assert_eq!(interpolate(&a, &b, 5.0).unwrap(), Vec2::new(5.0, 10.0));
        assert_eq!(interpolate(&a, &b, 0.0).unwrap(), a.pos);
        assert_eq!(interpolate(&a, &b, 10.0).unwrap(), b.pos);
    }

    #[test]
    fn interpolate_errors() {
        let a = LocalizationFix::new(0.0, (0.0, 0.0));
        let b = LocalizationFix::new(10.0, (10.0, 20.0));
        assert!(matches!(interpolate(&a, &b, 10.5), Err(Error::OutOfBracket { .. })));
        assert!(matches!(interpolate(&a, &b, -0.5), Err(Error::OutOfBracket { .. })));
        assert!(matches!(interpolate(&a, &a, 0.0), Err(Error::DegeneratePair(_))));
    }

    #[test]
    fn interpolation_on_single_leg_is_exact() {
        let traj = Trajectory::from_segments([(Vec2::new(1.5, -2.0), 30.0)], 30.0).unwrap();
        let mut src = ExactFixes(&traj);
        let a = src.localize(2.0).unwrap();
        let b = src.localize(27.0).unwrap();
        for i in 0..=100 {
            let t = 2.0 + 0.25 * i as f64;
            let est = interpolate(&a, &b, t).unwrap();
            assert!(est.distance(traj.position_at(t).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn noisy_fixes_default_to_exact_when_sigma_zero() {
        let traj = generate_trajectory(&ModelParams::baseline(), 3).unwrap();
        let rng = crate::mobility::replication_rng(1, 1);
        let mut noisy = NoisyFixes::new(&traj, 0.0, rng).unwrap();
        let fix = noisy.localize(42.0).unwrap();
        assert_eq!(fix.pos, traj.position_at(42.0).unwrap());
        assert!(NoisyFixes::new(&traj, -1.0, crate::mobility::replication_rng(1, 1)).is_err());
    }
}
