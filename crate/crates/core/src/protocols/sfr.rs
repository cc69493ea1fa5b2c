use super::LocalizationFix;
use crate::error::{check, Error, Result};

/// Localization instants `0, period, 2 period, ...` up to `span`.
pub fn sfr_schedule(period: f64, span: f64) -> Result<Vec<f64>> {
    check("period", period, period > 0.0, "> 0")?;
    check("span", span, span >= 0.0, ">= 0")?;
    // k * period rather than repeated addition keeps the grid exact.
    let count = (span / period).floor() as u64;
    Ok((0..=count).map(|k| k as f64 * period).filter(|&t| t <= span).collect())
}

/// The latest fix taken at or before `t_query`.
pub fn sfr_answer(fixes: &[LocalizationFix], t_query: f64) -> Result<LocalizationFix> {
    let idx = fixes.partition_point(|f| f.time <= t_query);
    if idx == 0 {
        return Err(Error::OutOfBracket {
            t: t_query,
            start: fixes.first().map_or(f64::INFINITY, |f| f.time),
            end: f64::INFINITY,
        });
    }
    Ok(fixes[idx - 1])
}
