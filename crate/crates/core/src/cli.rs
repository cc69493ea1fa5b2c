//! Command-line front end: `theory` evaluates closed forms on a grid,
//! `simulate` runs a named experiment and writes CSV plus a manifest.
//!
//! Exit codes: 0 success, 1 usage, 2 validation failure, 3 I/O.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analytic::{error_asymptote, error_at, error_avg, ErrorQuery};
use crate::error::Error;
use crate::montecarlo::{
    period_table, run_asymptotic_sweep, run_error_vs_count, run_error_vs_period, validate_conditional_moments,
    write_table, ExperimentConfig, ExperimentId, Table,
};

/// Fallback for `--out-dir`.
pub const OUT_DIR_ENV: &str = "MAINT_SIM_OUT_DIR";

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_IO: u8 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Validation(m) => write!(f, "validation failed: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Csv(_) => CliError::Io(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Inclusive `start:stop:step` grid, or a single value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        if self.start == self.stop {
            return vec![self.start];
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

impl FromStr for Range {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| format!("`{p}` is not a number")))
            .collect::<Result<_, _>>()?;
        let range = match parts[..] {
            [v] => Range {
                start: v,
                stop: v,
                step: 1.0,
            },
            [start, stop, step] => Range { start, stop, step },
            _ => return Err("expected `value` or `start:stop:step`".into()),
        };
        if ![range.start, range.stop, range.step].iter().all(|v| v.is_finite()) {
            return Err("range bounds must be finite".into());
        }
        if range.step <= 0.0 || range.stop < range.start {
            return Err("range needs start <= stop and step > 0".into());
        }
        Ok(range)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum TheoryMode {
    /// Error at each time `t` inside each period.
    ErrorT,
    /// Time-averaged error per period.
    ErrorAvg,
    /// Time-averaged error with `lambda = T / C`, next to its limit.
    Asymptote,
}

#[derive(Debug, Parser)]
#[command(
    name = "maint-sim",
    version,
    about = "Closed-form and simulated localization error for mobile sensors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate closed-form error curves on a grid.
    Theory(TheoryArgs),
    /// Run an experiment and write CSV plus a manifest.
    Simulate(SimulateArgs),
}

#[derive(Debug, clap::Args)]
struct TheoryArgs {
    #[arg(long, value_enum)]
    mode: TheoryMode,
    #[arg(long)]
    sigma: f64,
    /// Waypoint rate (per second).
    #[arg(long, conflicts_with = "ratio")]
    lambda: Option<f64>,
    /// Fixed `T / lambda` ratio.
    #[arg(long = "C", id = "ratio")]
    ratio: Option<f64>,
    /// Localization periods, `start:stop:step` or one value.
    #[arg(long = "T", id = "period")]
    period: Range,
    /// Query times for `error_t` (default: 101 points across each period).
    #[arg(long = "t")]
    times: Option<Range>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
struct SimulateArgs {
    /// fig4, fig5, fig6 or moments. Optional when `--manifest` is given.
    experiment: Option<String>,
    /// TOML file whose keys override the experiment defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Re-run a previously written manifest.
    #[arg(long, conflicts_with = "config")]
    manifest: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    queries: Option<usize>,
    /// Extra `key=value` overrides in TOML syntax, e.g. `model.sigma=2.0`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Output directory (default: $MAINT_SIM_OUT_DIR, then `./out`).
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

/// Everything needed to reproduce one `simulate` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub experiment: ExperimentId,
    pub seed: u64,
    pub tool_version: String,
    pub out_dir: PathBuf,
    pub outputs: Vec<String>,
    pub config: ExperimentConfig,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            return write!(stdout, "{e}").map_err(|e| CliError::Io(e.to_string()));
        }
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    match cli.command {
        Command::Theory(a) => cmd_theory(&a, stdout),
        Command::Simulate(a) => cmd_simulate(&a, stdout),
    }
}

pub fn main() -> ExitCode {
    let mut stdout = io::stdout().lock();
    match run(std::env::args_os(), &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn theory_table(a: &TheoryArgs) -> Result<Table, CliError> {
    let rate_for = |period: f64| -> Result<f64, CliError> {
        match (a.lambda, a.ratio) {
            (Some(l), None) => Ok(l),
            (None, Some(c)) => Ok(period / c),
            _ => Err(CliError::Usage("give exactly one of --lambda or --C".into())),
        }
    };
    let mut table = Table::default();
    match a.mode {
        TheoryMode::ErrorT => {
            table.header = ["T", "t", "lambda", "sigma", "error"].map(String::from).to_vec();
            for period in a.period.values() {
                let lambda = rate_for(period)?;
                let times = match a.times {
                    Some(r) => r.values(),
                    None => (0..=100).map(|i| period * i as f64 / 100.0).collect(),
                };
                for t in times {
                    let e = error_at(&ErrorQuery::at(a.sigma, lambda, period, t))?;
                    table.rows.push(vec![
                        period.to_string(),
                        t.to_string(),
                        lambda.to_string(),
                        a.sigma.to_string(),
                        e.to_string(),
                    ]);
                }
            }
        }
        TheoryMode::ErrorAvg => {
            table.header = ["T", "lambda", "sigma", "error_avg"].map(String::from).to_vec();
            for period in a.period.values() {
                let lambda = rate_for(period)?;
                let e = error_avg(&ErrorQuery::averaged(a.sigma, lambda, period))?;
                table.rows.push(vec![
                    period.to_string(),
                    lambda.to_string(),
                    a.sigma.to_string(),
                    e.to_string(),
                ]);
            }
        }
        TheoryMode::Asymptote => {
            let c = a
                .ratio
                .ok_or_else(|| CliError::Usage("asymptote mode needs --C".into()))?;
            let limit = error_asymptote(a.sigma, c)?;
            table.header = ["T", "lambda", "sigma", "error_avg", "asymptote"]
                .map(String::from)
                .to_vec();
            for period in a.period.values() {
                let lambda = period / c;
                let e = error_avg(&ErrorQuery::averaged(a.sigma, lambda, period))?;
                table.rows.push(vec![
                    period.to_string(),
                    lambda.to_string(),
                    a.sigma.to_string(),
                    e.to_string(),
                    limit.to_string(),
                ]);
            }
        }
    }
    Ok(table)
}

fn cmd_theory(a: &TheoryArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let table = theory_table(a)?;
    let meta: Vec<(String, String)> = [
        ("mode", format!("{:?}", a.mode)),
        ("sigma", a.sigma.to_string()),
        ("lambda", a.lambda.map(|v| v.to_string()).unwrap_or_default()),
        ("C", a.ratio.map(|v| v.to_string()).unwrap_or_default()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    match &a.out {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
            write_table(io::BufWriter::new(file), &meta, &table)?;
            writeln!(stdout, "{} rows -> {}", table.rows.len(), path.display())
                .map_err(|e| CliError::Io(e.to_string()))?;
        }
        None => {
            write_table(&mut *stdout, &meta, &table)?;
            eprintln!("{} rows", table.rows.len());
        }
    }
    Ok(())
}

fn resolve_config(a: &SimulateArgs) -> Result<(ExperimentId, ExperimentConfig, Option<PathBuf>), CliError> {
    let (id, mut cfg, manifest_dir) = match &a.manifest {
        Some(path) => {
            let m = RunManifest::load(path)?;
            if let Some(name) = &a.experiment {
                let id: ExperimentId = name.parse()?;
                if id != m.experiment {
                    return Err(CliError::Usage(format!("manifest is for {}, not {id}", m.experiment)));
                }
            }
            (m.experiment, m.config, Some(m.out_dir))
        }
        None => {
            let name = a
                .experiment
                .as_deref()
                .ok_or_else(|| CliError::Usage("name an experiment (fig4, fig5, fig6, moments)".into()))?;
            let id: ExperimentId = name.parse()?;
            let cfg = match &a.config {
                Some(path) => {
                    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
                    ExperimentConfig::from_toml_over_defaults(id, &text)?
                }
                None => ExperimentConfig::defaults(id),
            };
            (id, cfg, None)
        }
    };
    let mut overrides = toml::Table::new();
    for item in &a.sets {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("`{item}` is not KEY=VALUE")))?;
        let doc = format!("{} = {value}", key.trim());
        let parsed: toml::Table = doc
            .parse()
            .or_else(|_| format!("{} = {}", key.trim(), toml::Value::String(value.to_string())).parse())
            .map_err(|e| CliError::Usage(format!("`{item}`: {e}")))?;
        merge_into(&mut overrides, parsed);
    }
    if let Some(seed) = a.seed {
        cfg.model.seed = seed;
    }
    if let Some(r) = a.replications {
        cfg.replications = r;
    }
    if let Some(q) = a.queries {
        cfg.queries_per_replication = q;
    }
    let cfg = cfg.merged(overrides)?;
    Ok((id, cfg, manifest_dir))
}

fn merge_into(dst: &mut toml::Table, src: toml::Table) {
    for (k, v) in src {
        match (dst.get_mut(&k), v) {
            (Some(toml::Value::Table(d)), toml::Value::Table(s)) => merge_into(d, s),
            (_, v) => {
                dst.insert(k, v);
            }
        }
    }
}

fn out_dir(a: &SimulateArgs, from_manifest: Option<PathBuf>) -> PathBuf {
    a.out_dir
        .clone()
        .or(from_manifest)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn write_csv(path: &Path, meta: &[(String, String)], table: &Table) -> Result<(), CliError> {
    let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = io::BufWriter::new(file);
    write_table(&mut w, meta, table).map_err(|e| io_err(path, e))?;
    w.flush().map_err(|e| io_err(path, e))
}

fn cmd_simulate(a: &SimulateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (id, cfg, manifest_dir) = resolve_config(a)?;
    let dir = out_dir(a, manifest_dir);
    fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;

    let mut meta = vec![
        ("experiment".to_string(), id.to_string()),
        ("tool_version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        (
            "query_sampling".to_string(),
            format!("uniform, {} per replication", cfg.queries_per_replication),
        ),
    ];
    meta.extend(cfg.metadata());

    let mut failure = None;
    let table = match id {
        ExperimentId::Fig4 => run_error_vs_count(&cfg)?.to_table(),
        ExperimentId::Fig5 => period_table(&run_error_vs_period(&cfg)?),
        ExperimentId::Fig6 => period_table(&run_asymptotic_sweep(&cfg)?),
        ExperimentId::Moments => {
            let report = validate_conditional_moments(&cfg)?;
            if !report.passed() {
                let lines: Vec<String> = report
                    .failures()
                    .map(|c| format!("  {} [{}] z={:.2}", c.name, c.params, c.z_score))
                    .collect();
                failure = Some(format!("{} checks with |z| >= 4\n{}", lines.len(), lines.join("\n")));
            }
            report.to_table()
        }
    };

    let csv_name = format!("{id}.csv");
    let csv_path = dir.join(&csv_name);
    write_csv(&csv_path, &meta, &table)?;

    let manifest = RunManifest {
        experiment: id,
        seed: cfg.model.seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        out_dir: dir.clone(),
        outputs: vec![csv_name],
        config: cfg,
    };
    let manifest_path = dir.join(format!("{id}.manifest.toml"));
    let text = toml::to_string(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
    fs::write(&manifest_path, text).map_err(|e| io_err(&manifest_path, e))?;

    writeln!(stdout, "{id}: {} rows -> {}", table.rows.len(), csv_path.display())
        .map_err(|e| CliError::Io(e.to_string()))?;
    match failure {
        Some(msg) => Err(CliError::Validation(msg)),
        None => Ok(()),
    }
}
