//! The `riskcurve` command line.
//!
//! Tables are named with a small spec language:
//!
//! - `stpete:K,FEE`: St. Petersburg game with `K` rounds and an entrance fee
//! - `gfamily:I`: lose 1 with probability `(I-1)/I`, win `I` otherwise
//! - `[[-1,"1/2"],[2,"1/2"]]`: an inline JSON table
//! - anything else is read as a path to a JSON table
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage or domain error,
//! 3 numerical failure, 4 nothing found within the search bounds.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::clt::{min_repeats_clt, prob_pos_clt, CltParams};
use crate::error::{Error, Result};
use crate::exact::{min_repeats, prob_pos, prob_pos_sweep, RepeatsAnswer, DECIMAL_PLACES};
use crate::gamble::{g_family_table, st_pete_table, GambleTable};
use crate::laurent::{pgf, LaurentPoly};
use crate::montecarlo::{run_totals, summarize, worker_seed, SimConfig};
use crate::plot::{gnuplot_dat, line_chart_svg};
use crate::quadrature::{contour_positive_part_detailed, ContourSpec, DEFAULT_RADIUS};
use crate::rational::{parse_rational, to_decimal_string, to_f64, to_fraction_string};
use crate::recurrence::{
    extend, guess_recurrence, DEFAULT_MAX_DEGREE, DEFAULT_MAX_ORDER, DEFAULT_VERIFY_COUNT,
};

#[derive(Debug, Parser)]
#[command(
    name = "riskcurve",
    version,
    about = "Probability of ending ahead after n repeats of a gamble"
)]
pub struct Cli {
    /// More log output (repeat for more)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a probability table
    Table(TableArgs),
    /// Write the risk curve for n = 1..N as CSV/JSON, SVG and gnuplot data
    Sweep(SweepArgs),
    /// Smallest number of repeats that keeps the losing probability below epsilon
    Solve(SolveArgs),
    /// Monte Carlo runs of the gamble
    Simulate(SimulateArgs),
    /// Normal (central limit) approximation
    Approx(ApproxArgs),
    /// Fit a linear recurrence to the exact curve and optionally extend it
    Recurrence(RecurrenceArgs),
    /// Compare exact, contour quadrature, normal approximation and simulation
    Verify(VerifyArgs),
    /// Regenerate the nine reference risk curves
    Figures(FiguresArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Clt,
    Mc,
    Recurrence,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Clt => "clt",
            Method::Mc => "mc",
            Method::Recurrence => "recurrence",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Exact,
    Clt,
    Auto,
}

/// Count `gain > 0` (default) or `gain >= 0` as ending ahead.
#[derive(Debug, Clone, Copy, Args)]
pub struct StrictArgs {
    /// Ending ahead means a strictly positive total (default)
    #[arg(long, overrides_with = "no_strict")]
    strict: bool,
    /// Ending ahead means a total of zero or more
    #[arg(long = "no-strict", overrides_with = "strict")]
    no_strict: bool,
}

impl StrictArgs {
    pub fn strict(&self) -> bool {
        !self.no_strict
    }
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Table spec (stpete:K,FEE | gfamily:I | JSON file | inline JSON)
    pub spec: String,
    #[arg(long, value_enum, default_value = "text")]
    pub format: TableFormat,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub spec: String,
    /// Last n; defaults to the reference range for known tables, else 100
    #[arg(long)]
    pub n_max: Option<u64>,
    #[arg(long, value_enum, default_value = "exact")]
    pub method: Method,
    #[command(flatten)]
    pub strict: StrictArgs,
    /// Output directory
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Base name of the output files
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Seed for --method mc
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Runs per n for --method mc
    #[arg(long, default_value_t = 1000)]
    pub runs: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_ORDER)]
    pub max_order: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_DEGREE)]
    pub max_degree: usize,
    #[arg(long, default_value_t = DEFAULT_VERIFY_COUNT)]
    pub verify_count: usize,
    /// Exact terms computed before fitting (default: the minimum the bounds need)
    #[arg(long)]
    pub fit_terms: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub spec: String,
    /// Largest acceptable probability of ending behind, e.g. 0.1 or 1/10
    #[arg(long)]
    pub epsilon: String,
    #[arg(long, value_enum, default_value = "auto")]
    pub strategy: Strategy,
    #[command(flatten)]
    pub strict: StrictArgs,
    /// The condition must hold for every m in [n, n + window]
    #[arg(long, default_value_t = 10)]
    pub window: u64,
    /// Largest n the exact search considers
    #[arg(long, default_value_t = 1000)]
    pub horizon: u64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub spec: String,
    /// Plays per run
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 1000)]
    pub runs: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Also write every run total to this CSV file
    #[arg(long)]
    pub totals: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    pub spec: String,
    #[arg(long)]
    pub n: Option<u64>,
    /// Report the smallest n with approximate losing probability <= epsilon
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RecurrenceArgs {
    pub spec: String,
    /// Exact terms to compute (default: the minimum the bounds need)
    #[arg(long)]
    pub terms: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_MAX_ORDER)]
    pub max_order: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_DEGREE)]
    pub max_degree: usize,
    #[arg(long, default_value_t = DEFAULT_VERIFY_COUNT)]
    pub verify_count: usize,
    /// Extend the sequence to this n and print the value there
    #[arg(long)]
    pub extend: Option<u64>,
    #[command(flatten)]
    pub strict: StrictArgs,
    /// Write the recurrence as JSON into this directory
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub spec: String,
    #[arg(long)]
    pub n: u64,
    #[command(flatten)]
    pub strict: StrictArgs,
    #[arg(long, default_value_t = DEFAULT_RADIUS)]
    pub radius: f64,
    /// Quadrature sample count (power of two; default chosen from the polynomial)
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub runs: u64,
}

#[derive(Debug, Args)]
pub struct FiguresArgs {
    #[arg(long, default_value = "figures")]
    pub out: PathBuf,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();

    let command_line = render_command_line(&argv);
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(&cli.command, &command_line, &mut out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = out.flush();
            eprintln!("riskcurve: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::InvalidTable(_) | Error::Parse(_) | Error::InsufficientTerms { .. } => 2,
        Error::NumericalFailure(_) | Error::Singularity { .. } => 3,
        Error::NotFound(_) => 4,
        Error::Io(_) => 1,
    }
}

pub fn run(command: &Command, command_line: &str, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Table(a) => cmd_table(a, out),
        Command::Sweep(a) => cmd_sweep(a, command_line, out),
        Command::Solve(a) => cmd_solve(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Approx(a) => cmd_approx(a, out),
        Command::Recurrence(a) => cmd_recurrence(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Figures(a) => {
            for path in generate_figures(&a.out)? {
                writeln!(out, "{}", path.display())?;
            }
            Ok(())
        }
    }
}

/// Builds a table from the spec language described in the module docs.
pub fn parse_table_spec(spec: &str) -> Result<GambleTable> {
    let spec = spec.trim();
    let ints = |body: &str| -> Result<Vec<i64>> {
        body.split(',')
            .map(|p| {
                p.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad integer {p:?} in table spec {spec:?}")))
            })
            .collect()
    };
    if let Some(body) = spec.strip_prefix("stpete:") {
        match ints(body)?[..] {
            [k, fee] => st_pete_table(k, fee),
            _ => Err(Error::Parse(format!("expected stpete:K,FEE, got {spec:?}"))),
        }
    } else if let Some(body) = spec.strip_prefix("gfamily:") {
        match ints(body)?[..] {
            [i] => g_family_table(i),
            _ => Err(Error::Parse(format!("expected gfamily:I, got {spec:?}"))),
        }
    } else if spec.starts_with('[') {
        GambleTable::from_json(spec)
    } else {
        let path = Path::new(spec);
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{spec}: {e}")))?;
        let label = path.file_stem().map_or_else(|| spec.to_string(), |s| s.to_string_lossy().into_owned());
        Ok(GambleTable::from_json(&text)?.with_label(label))
    }
}

fn label_of(table: &GambleTable) -> String {
    table.label().map_or_else(|| table.to_string(), str::to_string)
}

/// Reference sweep length for the tables drawn in the reference figures.
pub fn default_n_max(table: &GambleTable, method: Method) -> u64 {
    match (table.label(), method) {
        (Some("gfamily:2"), _) => 200,
        (Some("gfamily:3"), _) => 600,
        (Some("gfamily:4"), _) => 700,
        (Some("gfamily:8" | "gfamily:9" | "gfamily:10"), _) => 3000,
        (Some("stpete:7,7"), Method::Clt) => 2000,
        (Some("stpete:7,7"), _) => 300,
        (Some("stpete:11,11"), _) => 2000,
        _ => 100,
    }
}

fn cmd_table(a: &TableArgs, out: &mut dyn Write) -> Result<()> {
    let table = parse_table_spec(&a.spec)?;
    match a.format {
        TableFormat::Text => writeln!(out, "{table}")?,
        TableFormat::Json => writeln!(out, "{}", table.to_json())?,
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub n_max: u64,
    pub method: Method,
    pub strict: bool,
    pub seed: u64,
    pub runs: u64,
    pub max_order: usize,
    pub max_degree: usize,
    pub verify_count: usize,
    pub fit_terms: Option<u64>,
}

impl SweepOptions {
    pub fn new(n_max: u64, method: Method) -> Self {
        Self {
            n_max,
            method,
            strict: true,
            seed: 1,
            runs: 1000,
            max_order: DEFAULT_MAX_ORDER,
            max_degree: DEFAULT_MAX_DEGREE,
            verify_count: DEFAULT_VERIFY_COUNT,
            fit_terms: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub n: u64,
    /// exact methods only
    pub fraction: Option<String>,
    pub decimal: String,
    pub value: f64,
}

/// A computed curve plus everything needed to regenerate it.
#[derive(Debug, Clone)]
pub struct SweepArtifact {
    pub label: String,
    pub table: GambleTable,
    /// method that produced the values (differs from the request on fallback)
    pub method: String,
    pub strict: bool,
    pub points: Vec<SweepPoint>,
    pub parameters: Value,
}

impl SweepArtifact {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,prob_fraction,prob_decimal\n");
        for p in &self.points {
            s.push_str(&format!(
                "{},{},{}\n",
                p.n,
                p.fraction.as_deref().unwrap_or(""),
                p.decimal
            ));
        }
        s
    }

    pub fn to_json(&self) -> Value {
        json!({
            "gamble": self.table,
            "label": self.label,
            "method": self.method,
            "strict": self.strict,
            "values": self.points.iter().map(|p| json!({
                "n": p.n,
                "prob_fraction": p.fraction,
                "prob_decimal": p.decimal,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn to_svg(&self) -> String {
        let title = format!("{} ({})", self.label, self.method);
        let y = if self.strict {
            "P(total > 0 after n plays)"
        } else {
            "P(total >= 0 after n plays)"
        };
        let pts: Vec<(f64, f64)> = self.points.iter().map(|p| (p.n as f64, p.value)).collect();
        line_chart_svg(&title, "n", y, &pts)
    }

    pub fn to_dat(&self) -> String {
        let header = format!("{} ({})\nn probability", self.label, self.method);
        let pts: Vec<(u64, String)> = self.points.iter().map(|p| (p.n, p.decimal.clone())).collect();
        gnuplot_dat(&header, &pts)
    }
}

fn exact_points(values: &[BigRational], first: u64) -> Vec<SweepPoint> {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| SweepPoint {
            n: first + i as u64,
            fraction: Some(to_fraction_string(v)),
            decimal: to_decimal_string(v, DECIMAL_PLACES),
            value: to_f64(v),
        })
        .collect()
}

fn float_points(values: impl IntoIterator<Item = (u64, f64)>) -> Vec<SweepPoint> {
    values
        .into_iter()
        .map(|(n, v)| SweepPoint {
            n,
            fraction: None,
            decimal: format!("{:.*}", DECIMAL_PLACES, v),
            value: v,
        })
        .collect()
}

pub fn build_sweep(table: &GambleTable, opts: &SweepOptions) -> Result<SweepArtifact> {
    if opts.n_max == 0 {
        return Err(Error::Domain("sweep length must be at least 1".into()));
    }
    let mut parameters = json!({ "n_max": opts.n_max });
    let (method, points) = match opts.method {
        Method::Exact => {
            let s = prob_pos_sweep(table, opts.n_max, opts.strict)?;
            ("exact".to_string(), exact_points(s.values(), 1))
        }
        Method::Clt => {
            let params = CltParams::from_table(table);
            let pts = (1..=opts.n_max)
                .map(|n| Ok((n, params.prob_pos(n)?)))
                .collect::<Result<Vec<_>>>()?;
            ("clt".to_string(), float_points(pts))
        }
        Method::Mc => {
            parameters["seed"] = json!(opts.seed);
            parameters["runs"] = json!(opts.runs);
            parameters["seed_rule"] = json!("run set for n uses worker_seed(seed, n)");
            let pts = (1..=opts.n_max)
                .map(|n| {
                    let cfg = SimConfig::new(worker_seed(opts.seed, n), n, opts.runs);
                    let totals = run_totals(table, &cfg)?;
                    let wins = totals.iter().filter(|&&t| t > 0 || (!opts.strict && t == 0)).count();
                    Ok((n, wins as f64 / opts.runs as f64))
                })
                .collect::<Result<Vec<_>>>()?;
            ("mc".to_string(), float_points(pts))
        }
        Method::Recurrence => {
            parameters["max_order"] = json!(opts.max_order);
            parameters["max_degree"] = json!(opts.max_degree);
            parameters["verify_count"] = json!(opts.verify_count);
            let needed = ((opts.max_order + 1) * (opts.max_degree + 1) + opts.max_order + opts.verify_count) as u64;
            let terms = opts.fit_terms.unwrap_or(needed).min(opts.n_max.max(needed));
            parameters["fit_terms"] = json!(terms);
            let seed = prob_pos_sweep(table, terms, opts.strict)?;
            match guess_recurrence(&seed, opts.max_order, opts.max_degree, opts.verify_count)
                .and_then(|rec| Ok((extend(&rec, &seed, opts.n_max)?, rec)))
            {
                Ok((series, rec)) => {
                    parameters["recurrence"] = rec.to_json();
                    ("recurrence".to_string(), exact_points(series.truncated(opts.n_max).values(), 1))
                }
                Err(e) => {
                    log::warn!("recurrence fit failed ({e}); falling back to the exact sweep");
                    parameters["fallback"] = json!(e.to_string());
                    let s = prob_pos_sweep(table, opts.n_max, opts.strict)?;
                    ("exact".to_string(), exact_points(s.values(), 1))
                }
            }
        }
    };
    Ok(SweepArtifact {
        label: label_of(table),
        table: table.clone(),
        method,
        strict: opts.strict,
        points,
        parameters,
    })
}

/// Writes `<name>.csv|json`, `.svg`, `.dat` and `.meta.json` into `dir`.
pub fn write_sweep(
    dir: &Path,
    name: &str,
    artifact: &SweepArtifact,
    format: Format,
    command_line: &str,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let data = match format {
        Format::Csv => (dir.join(format!("{name}.csv")), artifact.to_csv()),
        Format::Json => (
            dir.join(format!("{name}.json")),
            serde_json::to_string_pretty(&artifact.to_json())? + "\n",
        ),
    };
    let meta = json!({
        "command": command_line,
        "gamble": artifact.label,
        "table": artifact.table,
        "method": artifact.method,
        "strict": artifact.strict,
        "parameters": artifact.parameters,
        "generator": format!("riskcurve {}", env!("CARGO_PKG_VERSION")),
    });
    let files = [
        data,
        (dir.join(format!("{name}.svg")), artifact.to_svg()),
        (dir.join(format!("{name}.dat")), artifact.to_dat()),
        (
            dir.join(format!("{name}.meta.json")),
            serde_json::to_string_pretty(&meta)? + "\n",
        ),
    ];
    let mut written = Vec::new();
    for (path, contents) in files {
        write_atomic(&path, contents.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}

/// Write to a temporary sibling, then rename over the target.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{} has no file name", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp{}", file_name.to_string_lossy(), std::process::id()));
    let result = fs::File::create(&tmp)
        .and_then(|mut f| {
            f.write_all(contents)?;
            f.sync_all()
        })
        .and_then(|()| fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(Error::Io(format!("{}: {e}", path.display())));
    }
    Ok(())
}

fn default_name(label: &str, method: &str, n_max: u64) -> String {
    let clean: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '-' })
        .collect();
    format!("{}_{method}_{n_max}", clean.trim_matches('-'))
}

fn cmd_sweep(a: &SweepArgs, command_line: &str, out: &mut dyn Write) -> Result<()> {
    let table = parse_table_spec(&a.spec)?;
    let n_max = a.n_max.unwrap_or_else(|| default_n_max(&table, a.method));
    let opts = SweepOptions {
        n_max,
        method: a.method,
        strict: a.strict.strict(),
        seed: a.seed,
        runs: a.runs,
        max_order: a.max_order,
        max_degree: a.max_degree,
        verify_count: a.verify_count,
        fit_terms: a.fit_terms,
    };
    let artifact = build_sweep(&table, &opts)?;
    let name = a
        .name
        .clone()
        .unwrap_or_else(|| default_name(&artifact.label, a.method.tag(), n_max));
    for path in write_sweep(&a.out, &name, &artifact, a.format, command_line)? {
        writeln!(out, "{}", path.display())?;
    }
    Ok(())
}

fn refuse_if_unfavourable(table: &GambleTable) -> Result<()> {
    let mu = table.expected_value();
    if !mu.is_positive() {
        return Err(Error::Domain(format!(
            "the expected gain per play is {mu}, which is not positive: repeating cannot make this gamble safe, so refuse to play"
        )));
    }
    Ok(())
}

fn cmd_solve(a: &SolveArgs, out: &mut dyn Write) -> Result<()> {
    let table = parse_table_spec(&a.spec)?;
    let eps = parse_rational(&a.epsilon)?;
    if !eps.is_positive() || eps >= BigRational::one() {
        return Err(Error::Domain(format!("epsilon must lie in (0, 1), got {}", a.epsilon)));
    }
    refuse_if_unfavourable(&table)?;
    let strict = a.strict.strict();
    let eps_f = to_f64(&eps);
    let label = label_of(&table);

    let clt_n = || -> Result<Option<u64>> {
        match min_repeats_clt(&table, eps_f) {
            Ok(n) => Ok(Some(n)),
            // zero variance with positive mean: the normal model does not apply
            Err(Error::Domain(_)) if table.variance().is_zero() => Ok(None),
            Err(e) => Err(e),
        }
    };
    let report_exact = |out: &mut dyn Write, answer: &RepeatsAnswer| -> Result<bool> {
        match answer {
            RepeatsAnswer::Found(cert) => {
                let p = prob_pos(&table, cert.n, strict)?;
                writeln!(out, "gamble: {label}")?;
                writeln!(out, "strategy: exact")?;
                writeln!(out, "n = {}", cert.n)?;
                writeln!(out, "probability at n: {}", to_decimal_string(&p, DECIMAL_PLACES))?;
                writeln!(out, "certificate: {cert}")?;
                Ok(true)
            }
            RepeatsAnswer::NotFound { .. } => Ok(false),
        }
    };

    match a.strategy {
        Strategy::Exact => {
            let answer = min_repeats(&table, &eps, strict, a.window, a.horizon)?;
            if !report_exact(out, &answer)? {
                let RepeatsAnswer::NotFound { reason, .. } = answer else { unreachable!() };
                return Err(Error::NotFound(format!("{reason}; try --strategy clt or a larger --horizon")));
            }
        }
        Strategy::Clt => match clt_n()? {
            Some(n) => {
                writeln!(out, "gamble: {label}")?;
                writeln!(out, "strategy: clt")?;
                writeln!(out, "n = {n}")?;
                writeln!(out, "approximate probability at n: {:.10}", prob_pos_clt(&table, n)?)?;
            }
            None => {
                writeln!(out, "gamble: {label}")?;
                writeln!(out, "strategy: clt (deterministic gain, every play wins)")?;
                writeln!(out, "n = 1")?;
            }
        },
        Strategy::Auto => {
            let seed = clt_n()?;
            let horizon = seed.map_or(a.horizon, |n| (2 * n).max(50).min(a.horizon));
            let answer = min_repeats(&table, &eps, strict, a.window, horizon)?;
            if report_exact(out, &answer)? {
                if let Some(n) = seed {
                    writeln!(out, "clt estimate: n = {n}")?;
                }
            } else if let Some(n) = seed {
                log::warn!("exact search up to {horizon} found nothing; reporting the normal approximation");
                writeln!(out, "gamble: {label}")?;
                writeln!(out, "strategy: clt (exact search to n = {horizon} inconclusive)")?;
                writeln!(out, "n = {n}")?;
                writeln!(out, "approximate probability at n: {:.10}", prob_pos_clt(&table, n)?)?;
            } else {
                return Err(Error::NotFound(format!("no n <= {horizon} meets the target")));
            }
        }
    }
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let table = parse_table_spec(&a.spec)?;
    let cfg = SimConfig::new(a.seed, a.n, a.runs).with_workers(a.workers);
    let totals = run_totals(&table, &cfg)?;
    let summary = summarize(&totals);
    if let Some(path) = &a.totals {
        let mut csv = String::from("run,total\n");
        for (i, t) in totals.iter().enumerate() {
            csv.push_str(&format!("{},{t}\n", i + 1));
        }
        write_atomic(path, csv.as_bytes())?;
    }
    writeln!(out, "gamble: {}", label_of(&table))?;
    writeln!(out, "plays per run: {}, runs: {}, seed: {}, workers: {}", a.n, a.runs, a.seed, a.workers)?;
    writeln!(out, "mean gain per run: {:.7}", summary.mean_gain)?;
    writeln!(out, "fraction of runs ahead: {:.10}", summary.win_fraction)?;
    Ok(())
}

fn cmd_approx(a: &ApproxArgs, out: &mut dyn Write) -> Result<()> {
    let table = parse_table_spec(&a.spec)?;
    let params = CltParams::from_table(&table);
    writeln!(out, "gamble: {}", label_of(&table))?;
    writeln!(out, "mean: {} ({:.10})", params.mu, params.mu_f64())?;
    writeln!(out, "variance: {} ({:.10})", params.sigma2, to_f64(&params.sigma2))?;
    if a.n.is_none() && a.epsilon.is_none() {
        return Err(Error::Domain("give --n, --epsilon or both".into()));
    }
    if let Some(n) = a.n {
        writeln!(out, "n = {n}: P(total > 0) ~ {:.10}", params.prob_pos(n)?)?;
    }
    if let Some(eps) = a.epsilon {
        writeln!(out, "smallest n with approximate P >= 1 - {eps}: {}", min_repeats_clt(&table, eps)?)?;
    }
    Ok(())
}

fn cmd_recurrence(a: &RecurrenceArgs, out: &mut dyn Write) -> Result<()> {
    let table = parse_table_spec(&a.spec)?;
    let needed = ((a.max_order + 1) * (a.max_degree + 1) + a.max_order + a.verify_count) as u64;
    let terms = a.terms.unwrap_or(needed);
    let series = prob_pos_sweep(&table, terms, a.strict.strict())?;
    let rec = guess_recurrence(&series, a.max_order, a.max_degree, a.verify_count)?;
    writeln!(out, "gamble: {}", label_of(&table))?;
    writeln!(
        out,
        "order {}, degree {}, fitted on {} terms, checked exactly through n = {} ({})",
        rec.order(),
        rec.degree(),
        rec.fit_terms(),
        rec.verified_through(),
        rec.status()
    )?;
    writeln!(out, "{rec}")?;
    if let Some(target) = a.extend {
        let ext = extend(&rec, &series, target)?;
        let v = ext.get(target).expect("extended through target");
        writeln!(out, "a({target}) = {}", to_decimal_string(v, DECIMAL_PLACES))?;
    }
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir)?;
        let label = label_of(&table);
        let path = dir.join(format!("{}_recurrence.json", default_name(&label, "rec", terms)));
        let body = json!({ "gamble": label, "table": table, "strict": a.strict.strict(), "recurrence": rec.to_json() });
        write_atomic(&path, (serde_json::to_string_pretty(&body)? + "\n").as_bytes())?;
        writeln!(out, "{}", path.display())?;
    }
    Ok(())
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<()> {
    let table = parse_table_spec(&a.spec)?;
    let strict = a.strict.strict();
    if a.n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    writeln!(out, "gamble: {}, n = {}, {}", label_of(&table), a.n, if strict { "gain > 0" } else { "gain >= 0" })?;

    let power = pgf(&table).power(a.n);
    let exact = power.positive_part(strict);
    let exact_f = to_f64(&exact);
    writeln!(out, "exact:      {}  ({})", to_decimal_string(&exact, DECIMAL_PLACES), to_fraction_string(&exact))?;

    // the non-strict part of A is the strict part of x·A
    let integrand = if strict {
        power
    } else {
        power.multiply(&LaurentPoly::monomial(BigRational::one(), 1))
    };
    let spec = match a.samples {
        Some(s) => ContourSpec::new(a.radius, s),
        None => ContourSpec::for_poly(&integrand, a.radius),
    };
    match spec.and_then(|s| contour_positive_part_detailed(&integrand, &s)) {
        Ok(r) => writeln!(
            out,
            "quadrature: {:.10}  deviation {:+.3e}  (radius {:.6}, {} samples, error estimate {:.1e})",
            r.value,
            r.value - exact_f,
            r.radius,
            r.samples,
            r.error_estimate
        )?,
        Err(e) => writeln!(out, "quadrature: failed ({e})")?,
    }

    match prob_pos_clt(&table, a.n) {
        Ok(v) => writeln!(out, "clt:        {v:.10}  deviation {:+.3e}", v - exact_f)?,
        Err(e) => writeln!(out, "clt:        not applicable ({e})")?,
    }

    let totals = run_totals(&table, &SimConfig::new(a.seed, a.n, a.runs))?;
    let wins = totals.iter().filter(|&&t| t > 0 || (!strict && t == 0)).count();
    let frac = wins as f64 / a.runs as f64;
    let se = (exact_f * (1.0 - exact_f) / a.runs as f64).sqrt();
    let in_se = if se > 0.0 {
        format!("{:.2} standard errors", (frac - exact_f).abs() / se)
    } else {
        "exact value is 0 or 1".to_string()
    };
    writeln!(
        out,
        "mc:         {frac:.10}  deviation {:+.3e}  ({in_se}; {} runs, seed {})",
        frac - exact_f,
        a.runs,
        a.seed
    )?;
    Ok(())
}

/// One of the nine reference curves.
#[derive(Debug, Clone)]
pub struct FigureSpec {
    pub name: &'static str,
    pub spec: &'static str,
    pub n_max: u64,
    pub method: Method,
}

pub fn figure_plan() -> Vec<FigureSpec> {
    let f = |name, spec, n_max, method| FigureSpec {
        name,
        spec,
        n_max,
        method,
    };
    vec![
        f("fig1a_gfamily2", "gfamily:2", 200, Method::Exact),
        f("fig1b_gfamily3", "gfamily:3", 600, Method::Exact),
        f("fig1c_gfamily4", "gfamily:4", 700, Method::Exact),
        f("fig1d_gfamily8", "gfamily:8", 3000, Method::Exact),
        f("fig1e_gfamily9", "gfamily:9", 3000, Method::Exact),
        f("fig1f_gfamily10", "gfamily:10", 3000, Method::Exact),
        f("fig2a_stpete7_7", "stpete:7,7", 300, Method::Exact),
        f("fig2b_stpete7_7_clt", "stpete:7,7", 2000, Method::Clt),
        f("fig2c_stpete11_11_clt", "stpete:11,11", 2000, Method::Clt),
    ]
}

/// Writes CSV, SVG, gnuplot data and metadata for every reference curve.
pub fn generate_figures(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for fig in figure_plan() {
        log::info!("{}: {} to n = {} ({})", fig.name, fig.spec, fig.n_max, fig.method.tag());
        let table = parse_table_spec(fig.spec)?;
        let artifact = build_sweep(&table, &SweepOptions::new(fig.n_max, fig.method))?;
        let command = format!(
            "riskcurve sweep {} --n-max {} --method {} --strict --format csv --out {} --name {}",
            fig.spec,
            fig.n_max,
            fig.method.tag(),
            shell_quote(&dir.to_string_lossy()),
            fig.name
        );
        written.extend(write_sweep(dir, fig.name, &artifact, Format::Csv, &command)?);
    }
    Ok(written)
}

fn render_command_line(argv: &[OsString]) -> String {
    let mut parts = vec!["riskcurve".to_string()];
    parts.extend(argv.iter().skip(1).map(|a| shell_quote(&a.to_string_lossy())));
    parts.join(" ")
}

fn shell_quote(s: &str) -> String {
    let plain = !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || "-_./:,=+@%".contains(c));
    if plain {
        s.to_string()
    } else {
        format!("'{}'", s.replace('\'', r"'\''"))
    }
}
