use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::stats::{bin_by_key, BinnedResult, Moments};
use crate::analytic::{error_asymptote, error_avg, ErrorQuery};
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::mobility::{replication_rng, sample_trajectory, ModelParams, Trajectory};
use crate::protocols::{DvmConfig, ExactFixes, MadrdConfig, Protocol, ProtocolKind, Query, TriggerMode};

/// One answered query.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub protocol: ProtocolKind,
    /// Index into the experiment's list of protocol settings.
    pub setting: usize,
    pub replication: u64,
    pub query_time: f64,
    pub estimate: Vec2,
    pub truth: Vec2,
    pub sq_error: f64,
    pub abs_error: f64,
    /// Localizations the run spent over its whole span.
    pub localization_count: u64,
}

impl ErrorRecord {
    fn new(
        protocol: ProtocolKind,
        setting: usize,
        replication: u64,
        query_time: f64,
        estimate: Vec2,
        truth: Vec2,
        calls: u64,
    ) -> Self {
        let d = estimate - truth;
        ErrorRecord {
            protocol,
            setting,
            replication,
            query_time,
            estimate,
            truth,
            sq_error: d.norm_sq(),
            abs_error: d.norm(),
            localization_count: calls,
        }
    }
}

/// Smallest multiple of `period` covering `span`, so a periodic scheme has a
/// fix after every query.
pub fn covering_span(span: f64, period: f64) -> f64 {
    let k = (span / period).ceil().max(1.0);
    let covered = k * period;
    // guard against 100/3*3 < 100 style rounding
    if covered < span {
        (k + 1.0) * period
    } else {
        covered
    }
}

/// Result of the error-vs-energy sweep.
#[derive(Debug, Clone)]
pub struct CountSweep {
    /// Protocol settings in the order their `setting` index refers to.
    pub settings: Vec<Protocol>,
    pub records: Vec<ErrorRecord>,
    /// Per-protocol results binned by localization count.
    pub bins: BTreeMap<ProtocolKind, Vec<BinnedResult>>,
}

impl CountSweep {
    pub fn bins_for(&self, kind: ProtocolKind) -> &[BinnedResult] {
        self.bins.get(&kind).map(Vec::as_slice).unwrap_or(&[])
    }
}

fn count_sweep_settings(cfg: &ExperimentConfig) -> Vec<Protocol> {
    let mut out = Vec::new();
    for kind in &cfg.protocols {
        match kind {
            ProtocolKind::Maint => out.extend(cfg.t_values.iter().map(|&period| Protocol::Maint {
                period,
                mode: TriggerMode::TimerDriven,
            })),
            ProtocolKind::Sfr => out.extend(cfg.t_values.iter().map(|&period| Protocol::Sfr { period })),
            ProtocolKind::Madrd => out.extend(cfg.madrd_base_intervals.iter().map(|&b| {
                Protocol::Madrd(MadrdConfig {
                    e_thresh: cfg.madrd_e_thresh,
                    min_interval: cfg.madrd_min_interval,
                    ..MadrdConfig::with_base(b)
                })
            })),
            ProtocolKind::Dvm => out.extend(cfg.dvm_thresholds.iter().map(|&d| {
                Protocol::Dvm(DvmConfig {
                    threshold_distance: d,
                    ..DvmConfig::default()
                })
            })),
        }
    }
    out
}

fn run_span(protocol: &Protocol, span: f64) -> f64 {
    match *protocol {
        Protocol::Maint { period, .. } => covering_span(span, period),
        _ => span,
    }
}

fn uniform_queries(rng: &mut ChaCha8Rng, count: usize, upper: f64) -> Vec<Query> {
    (0..count)
        .map(|i| Query::new(rng.random_range(0.0..=upper), i as u64))
        .collect()
}

/// Error against localization count. Every protocol setting sees the same
/// trajectory and query times within a replication, so the comparison is
/// paired. Queries are uniform on `[0, span]`.
pub fn run_error_vs_count(cfg: &ExperimentConfig) -> Result<CountSweep> {
    cfg.validate()?;
    if cfg.protocols.is_empty() {
        return Err(Error::Config("no protocols selected".into()));
    }
    let settings = count_sweep_settings(cfg);
    let span = cfg.model.span;
    let traj_span = settings.iter().map(|p| run_span(p, span)).fold(span, f64::max);
    let model = cfg.model.with_span(traj_span);

    let per_rep: Vec<Result<Vec<ErrorRecord>>> = (0..cfg.replications as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replication_rng(model.seed, rep);
            let traj = sample_trajectory(&model, &mut rng)?;
            let queries = uniform_queries(&mut rng, cfg.queries_per_replication, span);
            let mut out = Vec::with_capacity(settings.len() * queries.len());
            for (idx, protocol) in settings.iter().enumerate() {
                let run = protocol.run(&mut ExactFixes(&traj), run_span(protocol, span), &queries, None)?;
                for a in &run.answers {
                    let truth = traj.position_at(a.query.time)?;
                    out.push(ErrorRecord::new(
                        protocol.kind(),
                        idx,
                        rep,
                        a.query.time,
                        a.estimate,
                        truth,
                        run.calls(),
                    ));
                }
            }
            Ok(out)
        })
        .collect();

    let mut records = Vec::new();
    for r in per_rep {
        records.extend(r?);
    }
    let mut bins = BTreeMap::new();
    for &kind in &cfg.protocols {
        let b = bin_by_key(
            records
                .iter()
                .filter(|r| r.protocol == kind)
                .map(|r| (r.localization_count, r.sq_error, r.abs_error)),
        );
        bins.insert(kind, b);
    }
    Ok(CountSweep {
        settings,
        records,
        bins,
    })
}

/// One point of a period sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodRow {
    pub period: f64,
    pub lambda_rate: f64,
    pub sigma: f64,
    /// Simulated mean squared error of timer-driven MAINT.
    pub mean_sq_error: f64,
    /// Standard error, from per-replication means.
    pub standard_error: f64,
    /// Closed-form time-averaged error.
    pub theory: f64,
    /// Limit as the period grows with `T / lambda` fixed (constant-ratio sweeps only).
    pub asymptote: Option<f64>,
    pub replications: u64,
    pub samples: u64,
}

impl PeriodRow {
    pub fn relative_error(&self) -> f64 {
        ((self.mean_sq_error - self.theory) / self.theory).abs()
    }
}

/// Mean squared MAINT error for one `(model, period)` with per-replication
/// streams offset by `stream_base`.
fn simulate_period(
    model: &ModelParams,
    period: f64,
    reps: usize,
    queries: usize,
    stream_base: u64,
) -> Result<(Moments, u64)> {
    let span = covering_span(model.span, period);
    let model = model.with_span(span);
    let protocol = Protocol::Maint {
        period,
        mode: TriggerMode::TimerDriven,
    };
    let per_rep: Vec<Result<(f64, u64)>> = (0..reps as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replication_rng(model.seed, stream_base | rep);
            let traj = sample_trajectory(&model, &mut rng)?;
            let qs = uniform_queries(&mut rng, queries, span);
            let run = protocol.run(&mut ExactFixes(&traj), span, &qs, None)?;
            let mut sum = 0.0;
            for a in &run.answers {
                sum += (a.estimate - traj.position_at(a.query.time)?).norm_sq();
            }
            let n = run.answers.len() as u64;
            Ok((sum / n.max(1) as f64, n))
        })
        .collect();
    let mut rep_means = Moments::default();
    let mut samples = 0;
    for r in per_rep {
        let (mean, n) = r?;
        rep_means.push(mean);
        samples += n;
    }
    Ok((rep_means, samples))
}

fn sweep(cfg: &ExperimentConfig, rate_for: impl Fn(f64) -> f64, with_asymptote: Option<f64>) -> Result<Vec<PeriodRow>> {
    cfg.validate()?;
    let sigma = cfg.model.sigma;
    cfg.t_values
        .iter()
        .enumerate()
        .map(|(i, &period)| {
            let lambda_rate = rate_for(period);
            let model = ModelParams {
                lambda_rate,
                ..cfg.model
            };
            model.validate()?;
            let (stats, samples) = simulate_period(
                &model,
                period,
                cfg.replications,
                cfg.queries_per_replication,
                (i as u64) << 32,
            )?;
            let theory = error_avg(&ErrorQuery::averaged(sigma, lambda_rate, period))?;
            let asymptote = match with_asymptote {
                Some(c) => Some(error_asymptote(sigma, c)?),
                None => None,
            };
            Ok(PeriodRow {
                period,
                lambda_rate,
                sigma,
                mean_sq_error: stats.mean(),
                standard_error: stats.standard_error(),
                theory,
                asymptote,
                replications: stats.count(),
                samples,
            })
        })
        .collect()
}

/// Simulated vs closed-form time-averaged MAINT error over the configured
/// periods, at the model's fixed waypoint rate.
pub fn run_error_vs_period(cfg: &ExperimentConfig) -> Result<Vec<PeriodRow>> {
    let rate = cfg.model.lambda_rate;
    sweep(cfg, |_| rate, None)
}

/// Same as [`run_error_vs_period`] but with the waypoint rate tied to the
/// period, `lambda = T / C`, so the error approaches a finite limit.
pub fn run_asymptotic_sweep(cfg: &ExperimentConfig) -> Result<Vec<PeriodRow>> {
    let c = cfg
        .ratio_c
        .ok_or_else(|| Error::Config("ratio_c is required for the constant-ratio sweep".into()))?;
    sweep(cfg, |period| period / c, Some(c))
}

/// Convenience for callers that already hold a trajectory: squared MAINT
/// error at each query for a timer-driven run over `traj.span()`.
pub fn maint_errors(traj: &Trajectory, period: f64, query_times: &[f64]) -> Result<Vec<f64>> {
    let qs: Vec<Query> = query_times
        .iter()
        .enumerate()
        .map(|(i, &t)| Query::new(t, i as u64))
        .collect();
    let run = Protocol::Maint {
        period,
        mode: TriggerMode::TimerDriven,
    }
    .run(&mut ExactFixes(traj), traj.span(), &qs, None)?;
    run.answers
        .iter()
        .map(|a| Ok((a.estimate - traj.position_at(a.query.time)?).norm_sq()))
        .collect()
}
