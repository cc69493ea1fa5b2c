//! With the waypoint rate tied to the period (`lambda = T / C`) the averaged
//! error flattens out towards a finite limit.
//!
//! cargo run --release --example asymptote [replications]

use maint_sim::montecarlo::{run_asymptotic_sweep, ExperimentConfig, ExperimentId};

fn main() -> maint_sim::Result<()> {
    let mut cfg = ExperimentConfig::defaults(ExperimentId::Fig6);
    if let Some(n) = std::env::args().nth(1).and_then(|s| s.parse().ok()) {
        cfg.replications = n;
    }
    println!(
        "{:>6} {:>8} {:>12} {:>10} {:>12} {:>12}",
        "T", "lambda", "simulated", "+/-", "theory", "limit"
    );
    for row in run_asymptotic_sweep(&cfg)? {
        println!(
            "{:>6} {:>8.2} {:>12.1} {:>10.1} {:>12.1} {:>12.1}",
            row.period,
            row.lambda_rate,
            row.mean_sq_error,
            row.standard_error,
            row.theory,
            row.asymptote.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
