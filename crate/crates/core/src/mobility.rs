//! Random waypoint mobility on the unbounded plane.
//!
//! At every waypoint the sensor draws a leg duration from an exponential
//! distribution with rate `lambda_rate` and a velocity whose components are
//! independent `Normal(0, sigma)`. Waypoint arrivals therefore form a Poisson
//! process, which is what the closed-form error analysis relies on. The
//! sensor starts at the origin at time zero.

use std::io::Write;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{check, Error, Result};
use crate::geom::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Waypoint rate (1/s); leg durations have mean `1 / lambda_rate`.
    pub lambda_rate: f64,
    /// Standard deviation of each velocity component (unit/s).
    pub sigma: f64,
    pub seed: u64,
    /// Simulated time (s).
    pub span: f64,
}

impl ModelParams {
    pub fn new(lambda_rate: f64, sigma: f64, seed: u64, span: f64) -> Result<Self> {
        let p = ModelParams {
            lambda_rate,
            sigma,
            seed,
            span,
        };
        p.validate()?;
        Ok(p)
    }

    /// sigma = 5 unit/s, mean leg time 10 s, 100 s span.
    pub fn baseline() -> Self {
        ModelParams {
            lambda_rate: 0.1,
            sigma: 5.0,
            seed: 1,
            span: 100.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check("lambda_rate", self.lambda_rate, self.lambda_rate > 0.0, "> 0")?;
        // sigma = 0 is the stationary limit and is allowed.
        check("sigma", self.sigma, self.sigma >= 0.0, ">= 0")?;
        check("span", self.span, self.span > 0.0, "> 0")?;
        Ok(())
    }

    pub fn with_span(self, span: f64) -> Self {
        ModelParams { span, ..self }
    }
}

/// One straight segment of the path between consecutive waypoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Leg {
    pub start_time: f64,
    pub start_pos: Vec2,
    pub velocity: Vec2,
    pub duration: f64,
}

impl Leg {
    pub fn end_time(&self) -> f64 {
        self.start_time + self.duration
    }

    pub fn end_pos(&self) -> Vec2 {
        self.start_pos + self.velocity * self.duration
    }

    fn position_at(&self, t: f64) -> Vec2 {
        self.start_pos + self.velocity * (t - self.start_time)
    }
}

/// Piecewise-linear path covering `[0, span]`.
///
/// The last leg keeps its full drawn duration and may end after `span`;
/// queries are still restricted to `[0, span]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    legs: Vec<Leg>,
    span: f64,
}

impl Trajectory {
    /// Builds a contiguous path from the origin out of `(velocity, duration)`
    /// pairs. The segments must reach at least `span`.
    pub fn from_segments<I>(segments: I, span: f64) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec2, f64)>,
    {
        check("span", span, span > 0.0, "> 0")?;
        let mut legs = Vec::new();
        let mut time = 0.0;
        let mut pos = Vec2::ZERO;
        for (velocity, duration) in segments {
            check("duration", duration, duration > 0.0, "> 0")?;
            let leg = Leg {
                start_time: time,
                start_pos: pos,
                velocity,
                duration,
            };
            time = leg.end_time();
            pos = leg.end_pos();
            legs.push(leg);
        }
        if time < span {
            return Err(Error::param(
                "segments",
                format!("cover only [0, {time}] but span is {span}"),
            ));
        }
        Ok(Trajectory { legs, span })
    }

    /// A sensor that never moves.
    pub fn stationary(span: f64) -> Result<Self> {
        Self::from_segments([(Vec2::ZERO, span)], span)
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn span(&self) -> f64 {
        self.span
    }

    /// Waypoint times `T_1, T_2, ...`, excluding `T_0 = 0`. The last one may
    /// lie past `span` only if the final leg starts there, which never happens
    /// for generated paths.
    pub fn waypoint_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.legs.iter().skip(1).map(|l| l.start_time)
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(0.0..=self.span).contains(&t) {
            return Err(Error::TimeOutOfRange { t, span: self.span });
        }
        Ok(())
    }

    /// Index of the leg in effect at `t`; at a waypoint time this is the leg
    /// starting there.
    fn leg_index(&self, t: f64) -> usize {
        self.legs.partition_point(|l| l.start_time <= t) - 1
    }

    pub fn position_at(&self, t: f64) -> Result<Vec2> {
        self.check_time(t)?;
        let leg = &self.legs[self.leg_index(t)];
        if t == leg.start_time {
            return Ok(leg.start_pos);
        }
        Ok(leg.position_at(t))
    }

    /// Number of waypoints with `0 < T_i <= t`.
    pub fn waypoint_count(&self, t: f64) -> Result<usize> {
        self.check_time(t)?;
        Ok(self.leg_index(t))
    }

    /// Number of waypoints strictly inside `(a, b)`.
    pub fn waypoints_between(&self, a: f64, b: f64) -> usize {
        self.waypoint_times().filter(|&w| w > a && w < b).count()
    }

    /// Dumps legs as CSV: `leg_index,start_time,start_x,start_y,u,v,duration`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["leg_index", "start_time", "start_x", "start_y", "u", "v", "duration"])?;
        for (i, leg) in self.legs.iter().enumerate() {
            w.write_record(&[
                i.to_string(),
                leg.start_time.to_string(),
                leg.start_pos.x.to_string(),
                leg.start_pos.y.to_string(),
                leg.velocity.x.to_string(),
                leg.velocity.y.to_string(),
                leg.duration.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Independent RNG stream for one replication.
pub fn replication_rng(seed: u64, replication_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication_index);
    rng
}

/// Exponential variate by inverse CDF; strictly positive.
pub fn sample_exponential<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    let u: f64 = rng.sample(Open01);
    -u.ln() / rate
}

/// Draws legs from `rng` until they cover `params.span`.
pub fn sample_trajectory<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Result<Trajectory> {
    params.validate()?;
    let normal = Normal::new(0.0, params.sigma).map_err(|e| Error::param("sigma", e.to_string()))?;
    let mut legs = Vec::with_capacity((params.lambda_rate * params.span) as usize + 2);
    let mut covered = 0.0;
    while covered < params.span {
        let duration = sample_exponential(rng, params.lambda_rate);
        let velocity = Vec2::new(normal.sample(rng), normal.sample(rng));
        covered += duration;
        legs.push((velocity, duration));
    }
    Trajectory::from_segments(legs, params.span)
}

/// Deterministic in `(params.seed, replication_index)`.
pub fn generate_trajectory(params: &ModelParams, replication_index: u64) -> Result<Trajectory> {
    let mut rng = replication_rng(params.seed, replication_index);
    sample_trajectory(params, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_legs() -> Trajectory {
        Trajectory::from_segments([(Vec2::new(1.0, 2.0), 4.0), (Vec2::new(-1.0, 0.5), 10.0)], 12.0).unwrap()
    }

    #[test]
    fn linear_motion_on_single_leg() {
        let traj = Trajectory::from_segments([(Vec2::new(1.0, 2.0), 10.0)], 10.0).unwrap();
        assert_eq!(traj.position_at(3.0).unwrap(), Vec2::new(3.0, 6.0));
        assert_eq!(traj.position_at(0.0).unwrap(), Vec2::ZERO);
    }

    #[test]
    fn waypoint_position_consistent_from_both_legs() {
        let traj = two_legs();
        let at = traj.position_at(4.0).unwrap();
        assert_eq!(at, Vec2::new(4.0, 8.0));
        let first = traj.legs()[0];
        assert_eq!(first.position_at(4.0), at);
        let eps = 1e-9;
        assert!(traj.position_at(4.0 - eps).unwrap().distance(at) < 1e-8);
        assert!(traj.position_at(4.0 + eps).unwrap().distance(at) < 1e-8);
    }

    #[test]
    fn out_of_span_rejected() {
        let traj = two_legs();
        assert!(matches!(traj.position_at(-0.1), Err(Error::TimeOutOfRange { .. })));
        assert!(matches!(traj.position_at(12.5), Err(Error::TimeOutOfRange { .. })));
        assert!(traj.waypoint_count(13.0).is_err());
    }

    #[test]
    fn waypoint_count_before_first_turn_is_zero() {
        let traj = two_legs();
        assert_eq!(traj.waypoint_count(3.9).unwrap(), 0);
        assert_eq!(traj.waypoint_count(4.0).unwrap(), 1);
        assert_eq!(traj.waypoint_count(12.0).unwrap(), 1);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(ModelParams::new(0.0, 5.0, 1, 100.0).is_err());
        assert!(ModelParams::new(0.1, -1.0, 1, 100.0).is_err());
        assert!(ModelParams::new(0.1, 5.0, 1, 0.0).is_err());
        assert!(ModelParams::new(f64::NAN, 5.0, 1, 10.0).is_err());
        let bad = ModelParams {
            lambda_rate: -1.0,
            ..ModelParams::baseline()
        };
        assert!(generate_trajectory(&bad, 0).is_err());
    }

    #[test]
    fn generation_is_deterministic_per_stream() {
        let p = ModelParams::baseline();
        assert_eq!(generate_trajectory(&p, 7).unwrap(), generate_trajectory(&p, 7).unwrap());
        assert_ne!(generate_trajectory(&p, 7).unwrap(), generate_trajectory(&p, 8).unwrap());
    }

    #[test]
    fn csv_dump_has_one_row_per_leg() {
        let traj = two_legs();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "leg_index,start_time,start_x,start_y,u,v,duration");
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[2], "1,4,4,8,-1,0.5,10");
    }

    proptest! {
        #[test]
        fn legs_tile_the_span(seed in 0u64..1000, rep in 0u64..1000, lambda in 0.01f64..2.0) {
            let p = ModelParams::new(lambda, 5.0, seed, 50.0).unwrap();
            let traj = generate_trajectory(&p, rep).unwrap();
            let legs = traj.legs();
            prop_assert_eq!(legs[0].start_time, 0.0);
            prop_assert_eq!(legs[0].start_pos, Vec2::ZERO);
            let mut cum_time = 0.0;
            let mut cum_pos = Vec2::ZERO;
            for pair in legs.windows(2) {
                cum_time += pair[0].duration;
                cum_pos += pair[0].velocity * pair[0].duration;
                prop_assert_eq!(pair[1].start_time, cum_time);
                prop_assert_eq!(pair[1].start_pos, cum_pos);
                if cum_time <= 50.0 {
                    prop_assert_eq!(traj.position_at(cum_time).unwrap(), cum_pos);
                }
            }
            prop_assert!(legs.last().unwrap().end_time() >= 50.0);
            prop_assert!(legs.iter().all(|l| l.duration > 0.0));
        }

        #[test]
        fn waypoint_count_is_monotone(seed in 0u64..500, a in 0.0f64..100.0, b in 0.0f64..100.0) {
            let traj = generate_trajectory(&ModelParams::baseline().with_span(100.0).clone_with_seed(seed), 0).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(traj.waypoint_count(lo).unwrap() <= traj.waypoint_count(hi).unwrap());
        }
    }

    impl ModelParams {
        fn clone_with_seed(self, seed: u64) -> Self {
            ModelParams { seed, ..self }
        }
    }
}
