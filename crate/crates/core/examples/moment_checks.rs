//! Monte Carlo estimates of the waypoint and position moments against their
//! closed forms. Exits non-zero if any check is off by 4 or more standard errors.
//!
//! cargo run --release --example moment_checks [samples]

use maint_sim::montecarlo::{validate_conditional_moments, CheckStatus, ExperimentConfig, ExperimentId};

fn main() -> maint_sim::Result<()> {
    let mut cfg = ExperimentConfig::defaults(ExperimentId::Moments);
    if let Some(n) = std::env::args().nth(1).and_then(|s| s.parse().ok()) {
        cfg.moments.samples = n;
    }
    let report = validate_conditional_moments(&cfg)?;
    for c in &report.checks {
        let tag = match c.status {
            CheckStatus::Pass => "ok  ",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skipped => "skip",
        };
        println!("{tag} {:<34} {:<34} z={:>6.2}", c.name, c.params, c.z_score);
    }
    println!("\nmax |z| = {:.2}", report.max_abs_z());
    if !report.passed() {
        std::process::exit(2);
    }
    Ok(())
}
