//! Command-line driver: argument parsing, artifact writing and exit codes.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use corrnet::correlation::{correlation_matrix, to_distance};
use corrnet::ergm::{
    fit_mple, gof, load_attributes, CovidScale, ErgmSpec, GofRow, SimulationConfig,
};
use corrnet::ingest::{self, load_panel, panel_summary, write_summary_csv, DEFAULT_GAP_LIMIT};
use corrnet::netmetrics::{canonical_methods, network_stats, rolling_run};
use corrnet::{CorrKind, Error, Method, WindowSpec, YieldPanel};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(
    name = "corrnet",
    version,
    about = "Correlation networks from multivariate yield series"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-entity summary statistics.
    Summary(Common),
    /// Rolling correlation moments and network statistics.
    Rolling(Common),
    /// Filtered networks and their statistics for one window.
    Network(NetworkArgs),
    /// ERGM fit on one filtered network.
    Ergm(ErgmArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Panel CSV: `date` column followed by one column per entity.
    #[serde(skip)]
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 120)]
    pub window: usize,
    #[arg(long, default_value_t = 10)]
    pub step: usize,
    #[arg(long, default_value_t = CorrKind::Conditional)]
    pub corr: CorrKind,
    #[arg(long, value_delimiter = ',', default_value = "mst,mast,ag,tmfg")]
    pub methods: Vec<Method>,
    #[arg(long)]
    pub from: Option<NaiveDate>,
    #[arg(long)]
    pub to: Option<NaiveDate>,
    /// Longest run of missing values filled forward.
    #[arg(long, default_value_t = DEFAULT_GAP_LIMIT)]
    pub gap_limit: usize,
    #[serde(skip)]
    #[arg(long, env = "CORRNET_OUT", default_value = "corrnet-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NetworkArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// End date of the window to analyse; defaults to the last window.
    #[arg(long)]
    pub window_end: Option<NaiveDate>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ErgmArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long)]
    pub window_end: Option<NaiveDate>,
    /// Filtered network to model.
    #[arg(long, default_value_t = Method::Mst)]
    pub method: Method,
    /// Node attribute CSV.
    #[serde(skip)]
    #[arg(long)]
    pub attrs: Option<PathBuf>,
    #[arg(long, default_value = "percent", value_parser = parse_covid_scale)]
    pub covid_scale: CovidScale,
    #[arg(long, default_value_t = 0.0)]
    pub ridge: f64,
    /// Simulated networks for the goodness-of-fit check; 0 skips it.
    #[arg(long, default_value_t = 10_000)]
    pub nsim: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Fit the edges-only null model instead of the full specification.
    #[arg(long)]
    pub edges_only: bool,
}

fn parse_covid_scale(s: &str) -> std::result::Result<CovidScale, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Invalid invocation detected after argument parsing.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Estimation finished without converging; artifacts were still written.
#[derive(Debug)]
pub struct NonConvergence(pub String);

impl std::fmt::Display for NonConvergence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for NonConvergence {}

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

/// Exit status for a failed run.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return EXIT_USAGE;
        }
        if cause.is::<NonConvergence>() {
            return EXIT_NONCONVERGENCE;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return if e.is_data_error() {
                EXIT_DATA
            } else {
                EXIT_NONCONVERGENCE
            };
        }
    }
    EXIT_DATA
}

/// Runs one subcommand, writing artifacts and printing a short report.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Summary(c) => cmd_summary(c, stdout),
        Command::Rolling(c) => cmd_rolling(c, stdout),
        Command::Network(a) => cmd_network(a, stdout),
        Command::Ergm(a) => cmd_ergm(a, stdout),
    }
}

/// Identifies a run: command, configuration hash and version.
struct Provenance {
    command: &'static str,
    hash: String,
}

impl Provenance {
    fn new<C: Serialize>(command: &'static str, config: &C, inputs: &[&Path]) -> Result<Self> {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        h.update(serde_json::to_vec(config)?);
        for p in inputs {
            let mut bytes = Vec::new();
            fs::File::open(p)
                .and_then(|mut f| f.read_to_end(&mut bytes))
                .with_context(|| format!("reading {}", p.display()))?;
            h.update(&bytes);
        }
        let digest = format!("{:x}", h.finalize());
        Ok(Self {
            command,
            hash: digest[..16].to_string(),
        })
    }

    fn line(&self) -> String {
        format!(
            "# corrnet {} command={} config={}\n",
            VERSION, self.command, self.hash
        )
    }

    fn json(&self) -> serde_json::Value {
        serde_json::json!({
            "tool": "corrnet",
            "version": VERSION,
            "command": self.command,
            "config": self.hash,
        })
    }
}

/// Writes `bytes` to `dir/name` via a temporary file in the same directory.
fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(&path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn write_with_header(dir: &Path, name: &str, prov: &Provenance, body: &[u8]) -> Result<PathBuf> {
    let mut bytes = prov.line().into_bytes();
    bytes.extend_from_slice(body);
    write_atomic(dir, name, &bytes)
}

fn write_json(
    dir: &Path,
    name: &str,
    prov: &Provenance,
    mut value: serde_json::Value,
) -> Result<PathBuf> {
    if let Some(obj) = value.as_object_mut() {
        obj.insert("provenance".into(), prov.json());
    }
    let mut bytes = serde_json::to_vec_pretty(&value)?;
    bytes.push(b'\n');
    write_atomic(dir, name, &bytes)
}

fn out_dir(c: &Common) -> Result<&Path> {
    fs::create_dir_all(&c.out).with_context(|| format!("creating {}", c.out.display()))?;
    Ok(&c.out)
}

fn load(c: &Common) -> Result<YieldPanel> {
    if let (Some(f), Some(t)) = (c.from, c.to) {
        if f > t {
            return Err(UsageError(format!("--from {f} is after --to {t}")).into());
        }
    }
    let panel = load_panel(&c.input, c.gap_limit)
        .with_context(|| format!("loading {}", c.input.display()))?;
    Ok(panel.slice_dates(c.from, c.to)?)
}

fn window_spec(c: &Common) -> Result<WindowSpec> {
    WindowSpec::new(c.window, c.step).map_err(|e| UsageError(e.to_string()).into())
}

fn methods(c: &Common) -> Result<Vec<Method>> {
    let m = canonical_methods(&c.methods);
    if m.is_empty() {
        return Err(UsageError("--methods is empty".into()).into());
    }
    Ok(m)
}

fn to_csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> corrnet::Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

pub fn cmd_summary(c: &Common, stdout: &mut dyn Write) -> Result<()> {
    let prov = Provenance::new("summary", c, &[&c.input])?;
    let panel = load(c)?;
    let rows = panel_summary(&panel)?;
    let body = to_csv_bytes(|b| write_summary_csv(b, &rows))?;
    let path = write_with_header(out_dir(c)?, "summary.csv", &prov, &body)?;
    writeln!(
        stdout,
        "{} entities, {} rows -> {}",
        rows.len(),
        panel.n_rows(),
        path.display()
    )?;
    Ok(())
}

pub fn cmd_rolling(c: &Common, stdout: &mut dyn Write) -> Result<()> {
    let prov = Provenance::new("rolling", c, &[&c.input])?;
    let methods = methods(c)?;
    let spec = window_spec(c)?;
    let panel = load(c)?;
    let series = rolling_run(&panel, spec, c.corr, &methods)?;
    let body = to_csv_bytes(|b| series.write_csv(b))?;
    let path = write_with_header(out_dir(c)?, "rolling.csv", &prov, &body)?;
    writeln!(stdout, "{} windows -> {}", series.len(), path.display())?;
    Ok(())
}

/// The window ending on `end`, or the last window when `end` is `None`.
fn select_window<'a>(
    panel: &'a YieldPanel,
    spec: WindowSpec,
    end: Option<NaiveDate>,
) -> Result<ingest::Window<'a>> {
    let mut all = ingest::windows(panel, spec)?;
    let pos = match end {
        None => all.len() - 1,
        Some(d) => all.iter().position(|w| w.end_date == d).ok_or_else(|| {
            let ends: Vec<String> = all.iter().map(|w| w.end_date.to_string()).collect();
            UsageError(format!(
                "no window ends on {d}; available window ends: {}",
                ends.join(", ")
            ))
        })?,
    };
    Ok(all.swap_remove(pos))
}

pub fn cmd_network(a: &NetworkArgs, stdout: &mut dyn Write) -> Result<()> {
    let c = &a.common;
    let prov = Provenance::new("network", a, &[&c.input])?;
    let methods = methods(c)?;
    let spec = window_spec(c)?;
    let panel = load(c)?;
    let window = select_window(&panel, spec, a.window_end)?;
    let end = window.end_date;
    let dist = correlation_matrix(&window, c.corr)
        .map(|corr| to_distance(&corr))
        .map_err(|e| e.in_window(end))?;
    let dir = out_dir(c)?;
    let mut stats = Vec::new();
    for m in &methods {
        let g = m.apply(&dist).map_err(|e| e.in_window(end))?;
        let body = to_csv_bytes(|b| g.write_edges_csv(b, Some(end)))?;
        write_with_header(dir, &format!("network_{end}_{m}.csv"), &prov, &body)?;
        let s = network_stats(&g).map_err(|e| e.in_window(end))?;
        writeln!(
            stdout,
            "{m}: {} edges, length {:.4}, central {}",
            s.n_edges, s.length, s.central_node
        )?;
        stats.push(s);
    }
    let value = serde_json::json!({
        "window_end": end.to_string(),
        "corr": c.corr.to_string(),
        "stats": stats,
    });
    write_json(dir, &format!("network_{end}_stats.json"), &prov, value)?;
    Ok(())
}

pub fn cmd_ergm(a: &ErgmArgs, stdout: &mut dyn Write) -> Result<()> {
    let c = &a.common;
    let Some(attrs_path) = &a.attrs else {
        return Err(UsageError("ergm needs --attrs FILE".into()).into());
    };
    if !(a.ridge >= 0.0 && a.ridge.is_finite()) {
        return Err(UsageError(format!("--ridge must be non-negative, got {}", a.ridge)).into());
    }
    let prov = Provenance::new("ergm", a, &[&c.input, attrs_path])?;
    let spec = window_spec(c)?;
    let panel = load(c)?;
    let attrs = load_attributes(attrs_path, a.covid_scale)
        .with_context(|| format!("loading {}", attrs_path.display()))?;
    let window = select_window(&panel, spec, a.window_end)?;
    let end = window.end_date;
    let g = correlation_matrix(&window, c.corr)
        .and_then(|corr| a.method.apply(&to_distance(&corr)))
        .map_err(|e| e.in_window(end))?;
    let model = if a.edges_only {
        ErgmSpec::edges_only()
    } else {
        ErgmSpec::economic()
    };
    let fit = fit_mple(&g, &attrs, &model, a.ridge)?;
    let column = a.method.as_str().to_uppercase();
    let table = fit.table(&model, &column);

    let gof_rows: Option<Vec<GofRow>> = if fit.converged && a.nsim > 0 {
        Some(gof(
            &g,
            &attrs,
            &model,
            &fit,
            SimulationConfig::new(a.nsim, a.seed),
        )?)
    } else {
        None
    };
    let mut report = fit.report_json();
    if let Some(obj) = report.as_object_mut() {
        obj.insert("window_end".into(), end.to_string().into());
        obj.insert("method".into(), a.method.to_string().into());
        obj.insert("n_edges".into(), fit.n_edges.into());
        obj.insert("n_dyads".into(), fit.n_dyads.into());
        obj.insert("iterations".into(), fit.iterations.into());
        obj.insert("gof".into(), serde_json::to_value(&gof_rows)?);
    }
    let dir = out_dir(c)?;
    let stem = format!("ergm_{end}_{}", a.method);
    write_json(dir, &format!("{stem}.json"), &prov, report)?;
    let mut text = table.clone();
    if let Some(rows) = &gof_rows {
        text.push_str(&gof_table(rows));
    }
    write_with_header(dir, &format!("{stem}.txt"), &prov, text.as_bytes())?;
    stdout.write_all(text.as_bytes())?;
    if !fit.converged {
        return Err(NonConvergence(format!(
            "ERGM estimation did not converge after {} iterations",
            fit.iterations
        ))
        .into());
    }
    Ok(())
}

fn gof_table(rows: &[GofRow]) -> String {
    use std::fmt::Write as _;
    let mut out = String::from("Goodness of fit (simulated at the fitted coefficients)\n");
    let _ = writeln!(
        out,
        "{:<28}{:>12}{:>12}{:>12}{:>10}",
        "Statistic", "Observed", "Sim. mean", "MC s.e.", "z"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<28}{:>12.3}{:>12.3}{:>12.4}{:>10.2}",
            r.term, r.observed, r.simulated_mean, r.mc_std_err, r.z_score
        );
    }
    out
}

/// Entry point shared by the binary: parses `args`, runs, returns the exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match run(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            exit_code(&e)
        }
    }
}
