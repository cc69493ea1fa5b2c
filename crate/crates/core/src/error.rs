use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("time {t} is outside the trajectory span [0, {span}]")]
    TimeOutOfRange { t: f64, span: f64 },

    #[error("unsupported moment order {0} (expected 1 or 2)")]
    UnsupportedMoment(u32),

    #[error("stale query at t={query} precedes the last fix at t={last_fix}")]
    StaleQuery { query: f64, last_fix: f64 },

    #[error("query time {t} is outside the fix bracket [{start}, {end}]")]
    OutOfBracket { t: f64, start: f64, end: f64 },

    #[error("degenerate fix pair: both fixes at t={0}")]
    DegeneratePair(f64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

/// Rejects NaN/inf and values that fail `ok`.
pub(crate) fn check(name: &'static str, value: f64, ok: bool, what: &str) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::param(name, format!("{value} is not finite")));
    }
    if !ok {
        return Err(Error::param(name, format!("{value} must be {what}")));
    }
    Ok(())
}
