//! Localization-call control for mobile sensors.
//!
//! A sensor that moves under the random waypoint model cannot know its own
//! position without invoking an expensive localization primitive. This crate
//! simulates that setting and compares schemes that decide when to localize
//! and how to answer position queries in between:
//!
//! * **MAINT** defers queries and answers them by linear interpolation
//!   between the two localization fixes that bracket the query time.
//! * **MADRD** extrapolates from the velocity between the last two fixes and
//!   adapts its localization interval from the observed prediction error.
//! * **SFR** localizes periodically and answers with the latest fix.
//! * **DVM** sets its next interval from a threshold distance and the most
//!   recently observed speed.
//!
//! Energy is measured as the number of localization calls. The [`analytic`]
//! module evaluates the closed-form expected squared error of MAINT, and
//! [`montecarlo`] checks those formulas against replicated simulations.
//!
//! ```
//! use maint_sim::analytic::{error_avg, ErrorQuery};
//!
//! let q = ErrorQuery::averaged(5.0, 0.1, 100.0);
//! let e = error_avg(&q).unwrap();
//! assert!((e - 10133.27).abs() < 0.01);
//! ```

pub mod analytic;
pub mod cli;
pub mod error;
pub mod geom;
pub mod mobility;
pub mod montecarlo;
pub mod protocols;

pub use error::{Error, Result};
pub use geom::Vec2;
pub use mobility::{generate_trajectory, Leg, ModelParams, Trajectory};
