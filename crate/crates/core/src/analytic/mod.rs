//! Closed-form moments of the random waypoint model and the expected
//! squared error of interpolation between periodic localization fixes.
//!
//! Notation: waypoints arrive as a Poisson process with rate `lambda`;
//! velocity components are `Normal(0, sigma)`; fixes are taken at `0` and
//! `T` and the estimate at `t in [0, T]` is the straight line between them.

mod conditional;
mod error_model;
pub mod quadrature;

pub use conditional::{
    cond_interarrival_moment, cond_position_second_moment, cond_waypoint_time_moment, interarrival_density,
    joint_prev_time_spacing_density, poisson_pmf, position_second_moment_given_count, waypoint_time_density,
    ConditionalMomentQuery,
};
pub use error_model::{
    cross_moment_xxprime, error_asymptote, error_at, error_avg, error_avg_constant_ratio, position_second_moment,
    ErrorQuery,
};
