use std::io::Write;

use super::experiments::{CountSweep, PeriodRow};
use super::moments::MomentReport;
use crate::error::Result;

/// A rectangular result ready for CSV.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes `# key=value` comment lines, then the table as CSV.
pub fn write_table<W: Write>(mut out: W, metadata: &[(String, String)], table: &Table) -> Result<()> {
    for (k, v) in metadata {
        writeln!(out, "# {k}={v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

impl CountSweep {
    /// One row per (protocol, localization count) bin.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&[
            "protocol",
            "localization_count",
            "mean_abs_error",
            "abs_standard_error",
            "mean_sq_error",
            "standard_error",
            "sample_count",
        ]);
        for (kind, bins) in &self.bins {
            for b in bins {
                t.rows.push(vec![
                    kind.to_string(),
                    b.key.to_string(),
                    b.mean_abs_error.to_string(),
                    b.abs_standard_error.to_string(),
                    b.mean_sq_error.to_string(),
                    b.standard_error.to_string(),
                    b.sample_count.to_string(),
                ]);
            }
        }
        t
    }
}

/// One row per period.
pub fn period_table(rows: &[PeriodRow]) -> Table {
    let mut t = Table::new(&[
        "period",
        "lambda",
        "sigma",
        "mean_sq_error",
        "standard_error",
        "theory",
        "asymptote",
        "relative_error",
        "replications",
        "samples",
    ]);
    for r in rows {
        t.rows.push(vec![
            r.period.to_string(),
            r.lambda_rate.to_string(),
            r.sigma.to_string(),
            r.mean_sq_error.to_string(),
            r.standard_error.to_string(),
            r.theory.to_string(),
            opt(r.asymptote),
            r.relative_error().to_string(),
            r.replications.to_string(),
            r.samples.to_string(),
        ]);
    }
    t
}

impl MomentReport {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&[
            "check",
            "params",
            "samples",
            "estimate",
            "standard_error",
            "theory",
            "z_score",
            "status",
        ]);
        for c in &self.checks {
            let status = match c.status {
                super::CheckStatus::Pass => "pass",
                super::CheckStatus::Fail => "fail",
                super::CheckStatus::Skipped => "skipped",
            };
            t.rows.push(vec![
                c.name.clone(),
                c.params.clone(),
                c.samples.to_string(),
                c.estimate.to_string(),
                c.standard_error.to_string(),
                c.theory.to_string(),
                c.z_score.to_string(),
                status.to_string(),
            ]);
        }
        t
    }
}
