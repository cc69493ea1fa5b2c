//! Acceptance suite. Each test checks one criterion at its stated tolerance
//! and prints a single PASS/FAIL line straight to stderr, so the lines show
//! up even when the harness captures test output.

use std::io::Write;
use std::time::Instant;

use maint_sim::analytic::quadrature::integrate;
use maint_sim::analytic::{error_at, error_avg, interarrival_density, waypoint_time_density, ErrorQuery};
use maint_sim::mobility::{generate_trajectory, ModelParams};
use maint_sim::montecarlo::{
    period_table, run_asymptotic_sweep, run_error_vs_count, run_error_vs_period, validate_conditional_moments,
    write_table, CheckStatus, ExperimentConfig, ExperimentId,
};
use maint_sim::protocols::{ExactFixes, Protocol, ProtocolKind, Query, TriggerMode};

fn report(id: u32, name: &str, ok: bool, detail: &str, started: Instant) {
    let tag = if ok { "PASS" } else { "FAIL" };
    let secs = started.elapsed().as_secs_f64();
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "acceptance [{tag}] criterion {id}: {name} | {detail} | {secs:.1}s");
}

#[test]
fn criterion_1_period_sweep_matches_closed_form() {
    let started = Instant::now();
    let cfg = ExperimentConfig {
        replications: 20_000,
        queries_per_replication: 20,
        ..ExperimentConfig::defaults(ExperimentId::Fig5)
    };
    assert_eq!(cfg.t_values, (1..=10).map(|i| 20.0 * i as f64).collect::<Vec<_>>());
    let rows = in_one_thread(|| run_error_vs_period(&cfg).unwrap());

    let worst = rows.iter().map(|r| r.relative_error()).fold(0.0, f64::max);
    let enough = rows.iter().all(|r| r.samples >= 2_000);
    let at100 = rows.iter().find(|r| r.period == 100.0).unwrap();
    let reference_ok = (at100.theory - 10133.3).abs() < 0.05;
    let fast = started.elapsed().as_secs_f64() < 60.0;
    let ok = worst <= 0.05 && enough && reference_ok && fast;
    report(
        1,
        "simulated MAINT error within 5% of closed form, T = 20..200",
        ok,
        &format!(
            "max rel err {:.2}%, T=100 sim {:.1} theory {:.1}, {} samples/T",
            100.0 * worst,
            at100.mean_sq_error,
            at100.theory,
            rows[0].samples
        ),
        started,
    );
    assert!(ok, "{rows:#?}");
}

#[test]
fn criterion_2_constant_ratio_sweep_reaches_limit() {
    let started = Instant::now();
    let cfg = ExperimentConfig {
        replications: 20_000,
        queries_per_replication: 20,
        ..ExperimentConfig::defaults(ExperimentId::Fig6)
    };
    assert_eq!((cfg.ratio_c, cfg.model.sigma), (Some(50.0), 10.0));
    let rows = in_one_thread(|| run_asymptotic_sweep(&cfg).unwrap());

    let worst_z = rows
        .iter()
        .map(|r| ((r.mean_sq_error - r.theory) / r.standard_error).abs())
        .fold(0.0, f64::max);
    let limit = 2.0 * 100.0 * 50.0 / 3.0;
    let tail_gap = rows
        .iter()
        .filter(|r| r.period >= 200.0)
        .map(|r| ((r.theory - limit) / limit).abs())
        .fold(0.0, f64::max);
    let limit_column_ok = rows.iter().all(|r| (r.asymptote.unwrap() - limit).abs() < 1e-9);
    let fast = started.elapsed().as_secs_f64() < 60.0;
    let ok = worst_z < 3.0 && tail_gap <= 0.01 && limit_column_ok && fast && rows.iter().any(|r| r.period >= 200.0);
    report(
        2,
        "constant T/lambda sweep within 3 SE, theory within 1% of limit at T >= 200",
        ok,
        &format!(
            "max |z| {worst_z:.2}, gap to {limit:.2} at T=200 {:.2}%",
            100.0 * tail_gap
        ),
        started,
    );
    assert!(ok, "{rows:#?}");
}

#[test]
fn criterion_3_maint_dominates_madrd_per_count_bin() {
    let started = Instant::now();
    let cfg = ExperimentConfig::defaults(ExperimentId::Fig4);
    assert_eq!(cfg.replications, 10_000);
    assert_eq!(cfg.model, ModelParams::baseline());
    let sweep = in_one_thread(|| run_error_vs_count(&cfg).unwrap());
    let maint = sweep.bins_for(ProtocolKind::Maint);
    let madrd = sweep.bins_for(ProtocolKind::Madrd);

    let mut compared = Vec::new();
    let mut violations = Vec::new();
    for m in maint.iter().filter(|b| b.sample_count >= 30) {
        if let Some(d) = madrd.iter().find(|b| b.key == m.key && b.sample_count >= 30) {
            compared.push(m.key);
            if m.mean_abs_error > d.mean_abs_error || m.mean_sq_error > d.mean_sq_error {
                violations.push(format!(
                    "calls {}: maint {:.3} vs madrd {:.3}",
                    m.key, m.mean_abs_error, d.mean_abs_error
                ));
            }
        }
    }
    let fast = started.elapsed().as_secs_f64() < 300.0;
    let ok = violations.is_empty() && !compared.is_empty() && fast;
    report(
        3,
        "MAINT mean error <= MADRD mean error in every shared count bin",
        ok,
        &format!("bins compared {compared:?}, violations {violations:?}"),
        started,
    );
    assert!(ok);
}

#[test]
fn criterion_4_moment_suite_and_density_normalization() {
    let started = Instant::now();
    let cfg = ExperimentConfig::defaults(ExperimentId::Moments);
    assert!(cfg.moments.samples >= 100_000);
    let report_ = validate_conditional_moments(&cfg).unwrap();
    let evaluated = report_
        .checks
        .iter()
        .filter(|c| c.status != CheckStatus::Skipped)
        .count();
    let skipped = report_.checks.len() - evaluated;
    let families = [
        "waypoint_time_m1",
        "waypoint_time_m2",
        "interarrival_m1",
        "interarrival_m2",
        "waypoint_position_m2",
        "position_m2_given_count",
        "position_m2",
        "cross_moment",
    ];
    let covered = families.iter().all(|f| {
        report_
            .checks
            .iter()
            .any(|c| c.name == *f && c.status == CheckStatus::Pass)
    });

    let tau = 10.0;
    let mut worst_norm = 0.0f64;
    for n in 1..=10u32 {
        for k in 1..=n {
            let q = integrate(|x| waypoint_time_density(x, tau, n, k).unwrap(), 0.0, tau, 1e-12);
            worst_norm = worst_norm.max((q.value - 1.0).abs());
        }
        let q = integrate(|y| interarrival_density(y, tau, n).unwrap(), 0.0, tau, 1e-12);
        worst_norm = worst_norm.max((q.value - 1.0).abs());
    }

    let ok = report_.passed() && covered && worst_norm <= 1e-8;
    report(
        4,
        "moment estimates |z| < 4 at 1e5 samples, densities integrate to 1 +- 1e-8",
        ok,
        &format!(
            "{evaluated} checks, {skipped} skipped, max |z| {:.2}, worst density mass error {worst_norm:.1e}",
            report_.max_abs_z()
        ),
        started,
    );
    assert!(ok, "{:#?}", report_.failures().collect::<Vec<_>>());
}

#[test]
fn criterion_5_structural_invariants() {
    let started = Instant::now();
    let mut failures = Vec::new();

    // endpoint zeros and t <-> T - t symmetry, bit for bit
    for sigma in [1.0, 5.0, 10.0] {
        for lambda in [0.05, 0.1, 0.5] {
            for period in [10.0, 50.0, 100.0, 200.0] {
                let at = |t: f64| error_at(&ErrorQuery::at(sigma, lambda, period, t)).unwrap();
                if at(0.0) != 0.0 || at(period) != 0.0 {
                    failures.push(format!("endpoint ({sigma},{lambda},{period})"));
                }
                // t in [T/2, T] makes T - t exact, so both queries name the
                // same pair of sub-intervals
                for i in 25..50 {
                    let t = period * i as f64 / 50.0;
                    let mirror = period - t;
                    assert_eq!(period - mirror, t);
                    if at(t) != at(mirror) {
                        failures.push(format!("symmetry ({sigma},{lambda},{period}) t={t}"));
                    }
                }
                let avg = error_avg(&ErrorQuery::averaged(sigma, lambda, period)).unwrap();
                let q = integrate(at, 0.0, period, 1e-10 * avg * period);
                if ((q.value / period - avg) / avg).abs() > 1e-6 {
                    failures.push(format!("quadrature ({sigma},{lambda},{period})"));
                }
            }
        }
    }

    // interpolation is exact when no waypoint falls between the fixes, and the
    // timer-driven call count is floor(span / T) + 1
    let params = ModelParams::baseline();
    let mut exact_brackets = 0;
    for rep in 0..2_000u64 {
        let traj = generate_trajectory(&params, rep).unwrap();
        let period = [3.0, 7.0, 10.0, 30.0][rep as usize % 4];
        let queries: Vec<Query> = (0..40).map(|i| Query::new(2.5 * i as f64, i)).collect();
        let run = Protocol::Maint {
            period,
            mode: TriggerMode::TimerDriven,
        }
        .run(&mut ExactFixes(&traj), 100.0, &queries, None)
        .unwrap();
        if run.calls() != (100.0f64 / period).floor() as u64 + 1 {
            failures.push(format!("call count rep {rep} T={period}"));
        }
        for a in &run.answers {
            let t = a.query.time;
            let lo = (t / period).floor() * period;
            let hi = (lo + period).min(run.fixes.last().unwrap().time);
            if hi > lo && traj.waypoints_between(lo, hi) == 0 {
                exact_brackets += 1;
                let truth = traj.position_at(t).unwrap();
                if a.estimate.distance(truth) > 32.0 * f64::EPSILON * truth.norm().max(1.0) {
                    failures.push(format!("exactness rep {rep} t={t}"));
                }
            }
        }
    }

    // same config and seed, byte-identical CSV
    let csv = |id: ExperimentId| {
        let cfg = ExperimentConfig {
            replications: 500,
            ..ExperimentConfig::defaults(id)
        };
        let table = match id {
            ExperimentId::Fig4 => run_error_vs_count(&cfg).unwrap().to_table(),
            ExperimentId::Fig6 => period_table(&run_asymptotic_sweep(&cfg).unwrap()),
            _ => period_table(&run_error_vs_period(&cfg).unwrap()),
        };
        let mut buf = Vec::new();
        write_table(&mut buf, &cfg.metadata(), &table).unwrap();
        buf
    };
    for id in [ExperimentId::Fig4, ExperimentId::Fig5, ExperimentId::Fig6] {
        if csv(id) != csv(id) {
            failures.push(format!("determinism {id}"));
        }
    }

    let ok = failures.is_empty() && exact_brackets > 1_000;
    report(
        5,
        "endpoint zeros, symmetry, quadrature identity, exact interpolation, call count, determinism",
        ok,
        &format!(
            "{} failures, {exact_brackets} waypoint-free brackets checked",
            failures.len()
        ),
        started,
    );
    assert!(ok, "{failures:#?}");
}

fn in_one_thread<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(f)
}
