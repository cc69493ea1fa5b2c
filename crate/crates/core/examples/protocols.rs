//! Run every localization scheme on the same trajectory and queries, and
//! compare what each one spends against the error it delivers. The MAINT run
//! also writes its event log.
//!
//! cargo run --example protocols

use maint_sim::mobility::{generate_trajectory, replication_rng, ModelParams};
use maint_sim::protocols::{DvmConfig, EventLog, ExactFixes, MadrdConfig, NoisyFixes, Protocol, Query, TriggerMode};
use rand::Rng;

fn main() -> maint_sim::Result<()> {
    let params = ModelParams::baseline();
    let traj = generate_trajectory(&params, 7)?;
    let mut rng = replication_rng(params.seed, 1_000);
    let queries: Vec<Query> = (0..50).map(|i| Query::new(rng.random_range(0.0..100.0), i)).collect();

    let schemes = [
        Protocol::Maint {
            period: 10.0,
            mode: TriggerMode::TimerDriven,
        },
        Protocol::Maint {
            period: 10.0,
            mode: TriggerMode::QueryDriven,
        },
        Protocol::Madrd(MadrdConfig::with_base(10.0)),
        Protocol::Sfr { period: 10.0 },
        Protocol::Dvm(DvmConfig::default()),
    ];

    println!(
        "{:<8} {:<14} {:>6} {:>9} {:>12}",
        "scheme", "setting", "calls", "answered", "mean e^2"
    );
    for scheme in &schemes {
        let run = scheme.run(&mut ExactFixes(&traj), params.span, &queries, None)?;
        let mse = run
            .answers
            .iter()
            .map(|a| (a.estimate - traj.position_at(a.query.time).unwrap()).norm_sq())
            .sum::<f64>()
            / run.answers.len().max(1) as f64;
        println!(
            "{:<8} {:<14} {:>6} {:>9} {:>12.2}",
            scheme.kind(),
            scheme.setting(),
            run.calls(),
            run.answers.len(),
            mse
        );
    }

    // noisy fixes: the interpolation error floor rises with the fix noise
    let noisy = NoisyFixes::new(&traj, 2.0, replication_rng(params.seed, 2_000))?;
    let mut log = EventLog::default();
    let run = schemes[0].run(&mut { noisy }, params.span, &queries, Some(&mut log))?;
    println!(
        "\nMAINT with 2 m fix noise: {} answers, {} events logged",
        run.answers.len(),
        log.events().len()
    );
    let path = std::env::temp_dir().join("maint_events.csv");
    log.write_csv(std::fs::File::create(&path)?)?;
    println!("event log -> {}", path.display());
    Ok(())
}
