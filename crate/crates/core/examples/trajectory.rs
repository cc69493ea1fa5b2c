//! Draw one random-waypoint trajectory, sample its position, and dump the
//! legs as CSV on stdout.
//!
//! cargo run --example trajectory [replication]

use maint_sim::{generate_trajectory, ModelParams};

fn main() -> maint_sim::Result<()> {
    let rep = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let params = ModelParams::baseline();
    let traj = generate_trajectory(&params, rep)?;

    eprintln!("{} legs over {} s", traj.legs().len(), traj.span());
    for t in [0.0, 25.0, 50.0, 75.0, 100.0] {
        let p = traj.position_at(t)?;
        eprintln!(
            "t={t:>5}: ({:>8.2}, {:>8.2})  waypoints so far: {}",
            p.x,
            p.y,
            traj.waypoint_count(t)?
        );
    }
    traj.write_csv(std::io::stdout().lock())
}
