//! Average position error against the number of localizations spent, for
//! MAINT at several periods and MADRD at several base intervals.
//!
//! cargo run --release --example error_vs_energy [replications]

use maint_sim::montecarlo::{run_error_vs_count, ExperimentConfig, ExperimentId};
use maint_sim::protocols::ProtocolKind;

fn main() -> maint_sim::Result<()> {
    let mut cfg = ExperimentConfig::defaults(ExperimentId::Fig4);
    if let Some(n) = std::env::args().nth(1).and_then(|s| s.parse().ok()) {
        cfg.replications = n;
    }
    let sweep = run_error_vs_count(&cfg)?;
    for kind in [ProtocolKind::Maint, ProtocolKind::Madrd] {
        println!("{kind}");
        println!("  {:>6} {:>12} {:>12} {:>8}", "calls", "mean |e|", "mean e^2", "n");
        for b in sweep.bins_for(kind) {
            println!(
                "  {:>6} {:>12.3} {:>12.2} {:>8}",
                b.key, b.mean_abs_error, b.mean_sq_error, b.sample_count
            );
        }
    }
    Ok(())
}
