//! Simulated MAINT error over the localization period next to the closed
//! form, at a fixed waypoint rate.
//!
//! cargo run --release --example period_sweep [replications]

use maint_sim::montecarlo::{run_error_vs_period, ExperimentConfig, ExperimentId};

fn main() -> maint_sim::Result<()> {
    let mut cfg = ExperimentConfig::defaults(ExperimentId::Fig5);
    if let Some(n) = std::env::args().nth(1).and_then(|s| s.parse().ok()) {
        cfg.replications = n;
    }
    println!(
        "{:>6} {:>12} {:>10} {:>12} {:>8}",
        "T", "simulated", "+/-", "theory", "rel"
    );
    for row in run_error_vs_period(&cfg)? {
        println!(
            "{:>6} {:>12.1} {:>10.1} {:>12.1} {:>7.2}%",
            row.period,
            row.mean_sq_error,
            row.standard_error,
            row.theory,
            100.0 * row.relative_error()
        );
    }
    Ok(())
}
