//! Replicated experiments and the moment-validation suite.
//!
//! Every replication draws from its own ChaCha8 stream keyed by
//! `(seed, index)`, and results are reduced in index order, so output is
//! identical for a given config regardless of thread count.

mod config;
mod experiments;
mod moments;
mod output;
mod stats;

pub use config::{ExperimentConfig, ExperimentId, MomentConfig};
pub use experiments::{
    covering_span, maint_errors, run_asymptotic_sweep, run_error_vs_count, run_error_vs_period, CountSweep,
    ErrorRecord, PeriodRow,
};
pub use moments::{validate_conditional_moments, CheckStatus, MomentCheck, MomentReport, Z_LIMIT};
pub use output::{period_table, write_table, Table};
pub use stats::{bin_by_key, BinnedResult, Moments};
