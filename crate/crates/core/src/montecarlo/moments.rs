use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::stats::Moments;
use crate::analytic::{
    cond_interarrival_moment, cond_position_second_moment, cond_waypoint_time_moment, cross_moment_xxprime,
    position_second_moment, position_second_moment_given_count, ConditionalMomentQuery,
};
use crate::error::{Error, Result};
use crate::mobility::{replication_rng, sample_trajectory, ModelParams, Trajectory};

/// Checks fail when the estimate sits this many standard errors off.
pub const Z_LIMIT: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Too few draws landed in the conditioning event.
    Skipped,
}

/// One simulated-vs-closed-form comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentCheck {
    pub name: String,
    /// Human-readable parameters, `key=value` separated by spaces.
    pub params: String,
    pub samples: u64,
    pub estimate: f64,
    pub standard_error: f64,
    pub theory: f64,
    pub z_score: f64,
    pub status: CheckStatus,
}

impl MomentCheck {
    fn from_moments(name: &str, params: String, m: &Moments, theory: f64) -> Self {
        let z = m.z_score(theory);
        MomentCheck {
            name: name.to_string(),
            params,
            samples: m.count(),
            estimate: m.mean(),
            standard_error: m.standard_error(),
            theory,
            z_score: z,
            status: if z.abs() < Z_LIMIT {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
        }
    }

    fn skipped(name: &str, params: String, samples: u64, theory: f64) -> Self {
        MomentCheck {
            name: name.to_string(),
            params,
            samples,
            estimate: f64::NAN,
            standard_error: f64::NAN,
            theory,
            z_score: f64::NAN,
            status: CheckStatus::Skipped,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub checks: Vec<MomentCheck>,
}

impl MomentReport {
    /// True when no check failed (skipped checks do not count against it).
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &MomentCheck> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }

    pub fn max_abs_z(&self) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.status != CheckStatus::Skipped)
            .map(|c| c.z_score.abs())
            .fold(0.0, f64::max)
    }
}

// Stream offsets keep every group of checks on its own randomness.
const STREAM_ORDER_STATS: u64 = 1 << 40;
const STREAM_REJECTION: u64 = 2 << 40;
const STREAM_SECOND: u64 = 3 << 40;
const STREAM_CROSS: u64 = 4 << 40;

/// Draws `samples` sets of `n` sorted waypoint times on `(0, tau)` with
/// velocities, and accumulates every conditional statistic at once.
fn order_statistic_checks(
    tau: f64,
    n: u32,
    sigma: f64,
    samples: usize,
    seed: u64,
    out: &mut Vec<MomentCheck>,
) -> Result<()> {
    let n_us = n as usize;
    let mut rng = replication_rng(seed, STREAM_ORDER_STATS | n as u64);
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::param("sigma", e.to_string()))?;
    let mut time1 = vec![Moments::default(); n_us];
    let mut time2 = vec![Moments::default(); n_us];
    let mut gap1 = vec![Moments::default(); n_us];
    let mut gap2 = vec![Moments::default(); n_us];
    let mut pos2 = vec![Moments::default(); n_us];
    let mut end2 = Moments::default();
    let mut times = vec![0.0; n_us];
    for _ in 0..samples {
        for t in times.iter_mut() {
            *t = rng.random::<f64>() * tau;
        }
        times.sort_by(f64::total_cmp);
        let mut prev = 0.0;
        let mut x = 0.0;
        for k in 0..n_us {
            let gap = times[k] - prev;
            x += normal.sample(&mut rng) * gap;
            time1[k].push(times[k]);
            time2[k].push(times[k] * times[k]);
            gap1[k].push(gap);
            gap2[k].push(gap * gap);
            pos2[k].push(x * x);
            prev = times[k];
        }
        let x_end = x + normal.sample(&mut rng) * (tau - prev);
        end2.push(x_end * x_end);
    }
    for k in 1..=n {
        let i = (k - 1) as usize;
        let p = format!("tau={tau} n={n} k={k}");
        for (order, stats) in [(1, &time1[i]), (2, &time2[i])] {
            let theory = cond_waypoint_time_moment(&ConditionalMomentQuery { tau, n, k, order })?;
            out.push(MomentCheck::from_moments(
                &format!("waypoint_time_m{order}"),
                p.clone(),
                stats,
                theory,
            ));
        }
        for (order, stats) in [(1, &gap1[i]), (2, &gap2[i])] {
            let theory = cond_interarrival_moment(tau, n, order)?;
            out.push(MomentCheck::from_moments(
                &format!("interarrival_m{order}"),
                p.clone(),
                stats,
                theory,
            ));
        }
        let theory = cond_position_second_moment(tau, n, k, sigma)?;
        out.push(MomentCheck::from_moments(
            "waypoint_position_m2",
            format!("{p} sigma={sigma}"),
            &pos2[i],
            theory,
        ));
    }
    let theory = position_second_moment_given_count(tau, n, sigma)?;
    out.push(MomentCheck::from_moments(
        "position_m2_given_count",
        format!("t={tau} i={n} sigma={sigma}"),
        &end2,
        theory,
    ));
    Ok(())
}

/// Same conditional position moment, but conditioning generated trajectories
/// on their waypoint count by rejection.
fn rejection_checks(
    model: &ModelParams,
    tau: f64,
    n_max: u32,
    samples: usize,
    min_accepted: usize,
    out: &mut Vec<MomentCheck>,
) -> Result<()> {
    let model = model.with_span(tau);
    let draws: Vec<Result<(usize, f64)>> = (0..samples as u64)
        .into_par_iter()
        .map(|s| {
            let mut rng = replication_rng(model.seed, STREAM_REJECTION | s);
            let traj = sample_trajectory(&model, &mut rng)?;
            let p = traj.position_at(tau)?;
            Ok((traj.waypoint_count(tau)?, 0.5 * (p.x * p.x + p.y * p.y)))
        })
        .collect();
    let mut by_count = vec![Moments::default(); n_max as usize + 1];
    for d in draws {
        let (count, value) = d?;
        if let Some(m) = by_count.get_mut(count) {
            m.push(value);
        }
    }
    for (i, m) in by_count.iter().enumerate() {
        let theory = position_second_moment_given_count(tau, i as u32, model.sigma)?;
        let params = format!("t={tau} i={i} sigma={} lambda={}", model.sigma, model.lambda_rate);
        out.push(if (m.count() as usize) < min_accepted {
            MomentCheck::skipped("position_m2_given_count_rejection", params, m.count(), theory)
        } else {
            MomentCheck::from_moments("position_m2_given_count_rejection", params, m, theory)
        });
    }
    Ok(())
}

/// `K` statistics at once from independent trajectories, one draw per sample.
fn trajectory_moments<const K: usize, F>(model: &ModelParams, samples: usize, stream: u64, f: F) -> Result<[Moments; K]>
where
    F: Fn(&Trajectory) -> Result<[f64; K]> + Sync,
{
    let values: Vec<Result<[f64; K]>> = (0..samples as u64)
        .into_par_iter()
        .map(|s| {
            let mut rng = replication_rng(model.seed, stream | s);
            let traj = sample_trajectory(model, &mut rng)?;
            f(&traj)
        })
        .collect();
    let mut out = [Moments::default(); K];
    for v in values {
        for (m, x) in out.iter_mut().zip(v?) {
            m.push(x);
        }
    }
    Ok(out)
}

/// Runs the whole moment-validation suite. The conditional checks use the
/// order-statistics construction directly and by rejection on generated
/// trajectories; the unconditional ones use generated trajectories.
pub fn validate_conditional_moments(cfg: &ExperimentConfig) -> Result<MomentReport> {
    cfg.validate()?;
    let mc = &cfg.moments;
    if !(mc.tau.is_finite() && mc.tau > 0.0) {
        return Err(Error::Config("moments.tau must be positive".into()));
    }
    if mc.samples < 2 {
        return Err(Error::Config("moments.samples must be >= 2".into()));
    }
    let model = cfg.model;
    let sigma = model.sigma;
    let mut checks = Vec::new();

    let groups: Vec<Result<Vec<MomentCheck>>> = (0..=mc.n_max)
        .into_par_iter()
        .map(|n| {
            let mut out = Vec::new();
            order_statistic_checks(mc.tau, n, sigma, mc.samples, model.seed, &mut out)?;
            Ok(out)
        })
        .collect();
    for g in groups {
        checks.extend(g?);
    }

    rejection_checks(&model, mc.tau, mc.n_max, mc.samples, mc.min_accepted, &mut checks)?;

    let mut stream = STREAM_SECOND;
    for &rate in &mc.second_moment_rates {
        for &t in &mc.second_moment_times {
            stream += 1 << 20;
            let m = ModelParams {
                lambda_rate: rate,
                ..model
            }
            .with_span(t);
            m.validate()?;
            let params = format!("t={t} lambda={rate} sigma={sigma}");
            // both axes are independent copies, so average them per draw
            let [first, second] = trajectory_moments(&m, mc.samples, stream, |traj| {
                let p = traj.position_at(t)?;
                Ok([0.5 * (p.x + p.y), 0.5 * p.norm_sq()])
            })?;
            checks.push(MomentCheck::from_moments("position_m1", params.clone(), &first, 0.0));
            let theory = position_second_moment(t, rate, sigma)?;
            checks.push(MomentCheck::from_moments("position_m2", params, &second, theory));
        }
    }

    let mut stream = STREAM_CROSS;
    for &[t, period] in &mc.cross_moment_points {
        stream += 1 << 20;
        let m = model.with_span(period);
        let [cross] = trajectory_moments(&m, mc.samples, stream, |traj| {
            let a = traj.position_at(t)?;
            let b = traj.position_at(period)? - a;
            Ok([0.5 * (a.x * b.x + a.y * b.y)])
        })?;
        let theory = cross_moment_xxprime(t, period, model.lambda_rate, sigma)?;
        let params = format!("t={t} T={period} lambda={} sigma={sigma}", model.lambda_rate);
        checks.push(MomentCheck::from_moments("cross_moment", params, &cross, theory));
    }

    Ok(MomentReport { checks })
}
