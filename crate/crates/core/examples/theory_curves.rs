//! Closed-form MAINT error: the profile inside one period, the averaged
//! error as the period grows, and the constant-ratio limit.
//!
//! cargo run --example theory_curves

use maint_sim::analytic::{error_asymptote, error_at, error_avg, error_avg_constant_ratio, ErrorQuery};

fn main() -> maint_sim::Result<()> {
    let (sigma, lambda, period) = (5.0, 0.1, 100.0);

    println!("error inside one period (T = {period})");
    for t in (0..=10).map(|i| i as f64 * 10.0) {
        let e = error_at(&ErrorQuery::at(sigma, lambda, period, t))?;
        println!("  t={t:>5}  {e:>10.1}  {}", "#".repeat((e / 500.0) as usize));
    }

    println!("\naveraged error against period");
    for period in [1.0, 10.0, 50.0, 100.0, 200.0] {
        println!(
            "  T={period:>5}  {:>10.2}",
            error_avg(&ErrorQuery::averaged(sigma, lambda, period))?
        );
    }

    let (sigma, c) = (10.0, 50.0);
    println!("\nconstant T/lambda = {c}, limit {:.2}", error_asymptote(sigma, c)?);
    for period in [20.0, 50.0, 100.0, 200.0, 1000.0] {
        println!("  T={period:>6}  {:>10.2}", error_avg_constant_ratio(sigma, c, period)?);
    }
    Ok(())
}
