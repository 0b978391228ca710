//! The `uai` command-line front end.
//!
//! Every successful invocation prints exactly one JSON document on stdout
//! that echoes the fully resolved configuration. Floats are written with 17
//! significant digits and infinities as the string `"inf"`. Exit codes: `0`
//! success, `1` computation error (an error document on stdout), `2` usage
//! error (message on stderr).

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::certainty::{certainty_equivalent, gaussian_entropic};
use crate::error::{Error, Result};
use crate::index::{acceptability_index, IndexOptions, IndexValue};
use crate::paths::{simulate, PathModelSpec};
use crate::perf::{duality_check, longrun_trajectory, maximize_over_strategies, LawMode, LongRunConfig, StrategyCandidate};
use crate::sample::{format_g17, EmpiricalDistribution, ReturnSeries};
use crate::utility::{RegularityGrid, RiskAversion, UtilityFamily};

#[derive(Debug, Parser)]
#[command(name = "uai", version, about = "Scaled-utility certainty equivalents and acceptability indices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Certainty equivalent μ_γ of a sample file or a Gaussian law.
    Ce(CeArgs),
    /// Acceptability index of a sample file.
    Index(IndexArgs),
    /// Index of terminal log-growth samples against a benchmark.
    Perf(PerfArgs),
    /// Rank candidate strategies by their benchmarked index.
    Maximize(MaximizeArgs),
    /// Index trajectory along growing horizons and its long-run regime.
    Longrun(LongrunArgs),
    /// Simulate one series from a return model.
    Simulate(SimulateArgs),
    /// Certify scale-aversion regularity on a grid.
    Regularity(RegularityArgs),
    /// Compare the long-run index with its risk-sensitive dual.
    Duality(DualityArgs),
}

fn parse_utility(s: &str) -> std::result::Result<UtilityFamily, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
struct CeArgs {
    #[arg(long, value_parser = parse_utility)]
    utility: UtilityFamily,
    #[arg(long)]
    gamma: f64,
    /// CSV of outcomes, one per line or `timestamp,value`.
    #[arg(long, conflicts_with = "gaussian", required_unless_present = "gaussian")]
    input: Option<PathBuf>,
    /// Gaussian law `m,sigma` (exponential utility only).
    #[arg(long, allow_hyphen_values = true)]
    gaussian: Option<String>,
}

#[derive(Debug, Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 1e-8)]
    gamma_min: f64,
    #[arg(long, default_value_t = 1e8)]
    gamma_cap: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol_rel: f64,
}

impl SolverArgs {
    fn options(&self) -> IndexOptions {
        IndexOptions { gamma_min: self.gamma_min, gamma_cap: self.gamma_cap, tol_rel: self.tol_rel }
    }
}

#[derive(Debug, Args)]
struct IndexArgs {
    #[arg(long, value_parser = parse_utility)]
    utility: UtilityFamily,
    #[arg(long)]
    input: PathBuf,
    /// Benchmark growth rate λ; the position becomes `X − λ·horizon`.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    benchmark_rate: f64,
    #[arg(long, default_value_t = 1)]
    horizon: usize,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args)]
struct PerfArgs {
    #[arg(long, value_parser = parse_utility)]
    utility: UtilityFamily,
    /// CSV of terminal log-growth samples `ln V_T`.
    #[arg(long)]
    input: PathBuf,
    /// Deterministic benchmark `ln G_T` (for example `λT`).
    #[arg(long, allow_hyphen_values = true)]
    benchmark: f64,
}

fn parse_candidate(s: &str) -> std::result::Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((label, path)) if !label.is_empty() && !path.is_empty() => Ok((label.to_string(), PathBuf::from(path))),
        _ => Err(format!("expected label=path, got '{s}'")),
    }
}

#[derive(Debug, Args)]
struct MaximizeArgs {
    #[arg(long, value_parser = parse_utility)]
    utility: UtilityFamily,
    /// `label=path` of a CSV of terminal log-growth samples; repeatable.
    #[arg(long = "candidate", value_parser = parse_candidate, required = true)]
    candidates: Vec<(String, PathBuf)>,
    #[arg(long, allow_hyphen_values = true)]
    benchmark: f64,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// `iid`, `arma`, `fgn`, `ou`, or a full spec such as
    /// `fgn:hurst=0.7,sigma=0.2,mean=0.07`.
    #[arg(long)]
    model: String,
    #[arg(long)]
    hurst: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mean: Option<f64>,
    /// AR coefficients, `/`-separated.
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
    /// MA coefficients, `/`-separated.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    #[arg(long)]
    kappa: Option<f64>,
    /// Mean-reversion level of the OU process.
    #[arg(long, allow_hyphen_values = true)]
    level: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
}

impl ModelArgs {
    fn resolve(&self) -> Result<PathModelSpec> {
        let flags: Vec<(&str, Option<String>)> = vec![
            ("hurst", self.hurst.map(|v| v.to_string())),
            ("sigma", self.sigma.map(|v| v.to_string())),
            ("mean", self.mean.map(|v| v.to_string())),
            ("phi", self.phi.clone()),
            ("theta", self.theta.clone()),
            ("kappa", self.kappa.map(|v| v.to_string())),
            ("theta", self.level.map(|v| v.to_string())),
            ("x0", self.x0.map(|v| v.to_string())),
            ("dt", self.dt.map(|v| v.to_string())),
        ];
        let given: Vec<(&str, String)> = flags.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))).collect();
        if self.model.contains(':') {
            if !given.is_empty() {
                return Err(Error::InvalidParameter("model parameters given both inline and as flags".into()));
            }
            return self.model.parse();
        }
        let kind = self.model.as_str();
        if kind == "ou" && self.theta.is_some() {
            return Err(Error::InvalidParameter("use --level for the OU mean-reversion level".into()));
        }
        if kind != "ou" && self.level.is_some() {
            return Err(Error::InvalidParameter("--level applies to the ou model only".into()));
        }
        let body = given.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",");
        format!("{kind}:{body}").parse()
    }
}

#[derive(Debug, Clone)]
struct TGrid(Vec<usize>);

fn parse_tgrid_arg(s: &str) -> std::result::Result<TGrid, String> {
    parse_tgrid(s).map(TGrid)
}

fn parse_tgrid(s: &str) -> std::result::Result<Vec<usize>, String> {
    let bad = || format!("expected start:end:xFACTOR, start:end:+STEP or a comma list, got '{s}'");
    if s.contains(',') || !s.contains(':') {
        return s.split(',').map(|p| p.trim().parse::<usize>().map_err(|_| bad())).collect();
    }
    let parts: Vec<&str> = s.split(':').collect();
    let [start, end, step] = parts.as_slice() else { return Err(bad()) };
    let start: usize = start.parse().map_err(|_| bad())?;
    let end: usize = end.parse().map_err(|_| bad())?;
    let mut grid = Vec::new();
    let mut t = start;
    if let Some(f) = step.strip_prefix('x') {
        let f: usize = f.parse().map_err(|_| bad())?;
        if f < 2 || start == 0 {
            return Err(bad());
        }
        while t <= end {
            grid.push(t);
            t *= f;
        }
    } else {
        let d: usize = step.strip_prefix('+').unwrap_or(step).parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        while t <= end {
            grid.push(t);
            t += d;
        }
    }
    Ok(grid)
}

fn parse_law(s: &str) -> std::result::Result<LawMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
struct LongrunArgs {
    #[arg(long, value_parser = parse_utility)]
    utility: UtilityFamily,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, allow_hyphen_values = true)]
    lambda: f64,
    #[arg(long, value_parser = parse_tgrid_arg, default_value = "32:2048:x2")]
    tgrid: TGrid,
    #[arg(long, default_value_t = 2000)]
    paths: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// `auto`, `empirical`, `gaussian-fit` or `exact`.
    #[arg(long, value_parser = parse_law, default_value = "auto")]
    law: LawMode,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the series as CSV here instead of embedding it in the JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RegularityArgs {
    #[arg(long, value_parser = parse_utility)]
    utility: UtilityFamily,
    #[arg(long, default_value_t = 1e-2)]
    gamma_min: f64,
    #[arg(long, default_value_t = 1e2)]
    gamma_max: f64,
    #[arg(long, default_value_t = 64)]
    gamma_points: usize,
    #[arg(long, default_value_t = -20.0, allow_hyphen_values = true)]
    x_min: f64,
    #[arg(long, default_value_t = 20.0, allow_hyphen_values = true)]
    x_max: f64,
    #[arg(long, default_value_t = 401)]
    x_points: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Debug, Args)]
struct DualityArgs {
    #[arg(long, allow_hyphen_values = true)]
    m: f64,
    #[arg(long)]
    sigma: f64,
    #[arg(long, allow_hyphen_values = true)]
    lambda: f64,
    #[arg(long, default_value_t = 100_000)]
    paths: usize,
    #[arg(long, default_value_t = 8)]
    horizon: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

/// JSON formatter printing every float with 17 significant digits.
struct G17Formatter;

impl serde_json::ser::Formatter for G17Formatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        writer.write_all(format_g17(value).as_bytes())
    }
}

/// Serializes `value` as one line of JSON in the crate's float format.
pub fn to_json_line<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, G17Formatter);
    value.serialize(&mut ser).map_err(|e| Error::Evaluation(format!("JSON serialization failed: {e}")))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

fn to_value<T: Serialize>(value: &T) -> Result<Value> {
    serde_json::to_value(value).map_err(|e| Error::Evaluation(format!("JSON conversion failed: {e}")))
}

/// Number or `"inf"`/`"-inf"`/`"nan"`.
fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v.is_nan() {
        json!("nan")
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn index_fields(v: &IndexValue) -> Value {
    json!({
        "alpha": num(v.value),
        "kind": v.kind,
        "diagnostic": v.diagnostic,
        "bracket": [num(v.bracket.0), num(v.bracket.1)],
        "evals": v.evaluations,
    })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(a), Value::Object(b)) = (&mut base, extra) {
        a.extend(b);
    }
    base
}

fn load_samples(path: &Path) -> Result<EmpiricalDistribution> {
    ReturnSeries::from_csv_path(path, "1")?.to_distribution()
}

fn run_command(command: Command) -> Result<Value> {
    match command {
        Command::Ce(a) => {
            let gamma = RiskAversion::new(a.gamma)?;
            let (mu, source) = match (&a.input, &a.gaussian) {
                (_, Some(spec)) => {
                    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
                    let [m, s] = parts.as_slice() else {
                        return Err(Error::InvalidParameter(format!("--gaussian expects m,sigma, got '{spec}'")));
                    };
                    let parse = |t: &str| {
                        t.parse::<f64>().map_err(|_| Error::InvalidParameter(format!("'{t}' is not a number")))
                    };
                    let (m, s) = (parse(m)?, parse(s)?);
                    if !a.utility.is_exponential() {
                        return Err(Error::Unsupported("the Gaussian closed form needs exponential utility".into()));
                    }
                    (gaussian_entropic(gamma, m, s)?, json!({"gaussian": {"m": m, "sigma": s}}))
                }
                (Some(path), None) => {
                    let dist = load_samples(path)?;
                    (certainty_equivalent(&a.utility, gamma, &dist)?.value, json!({"input": path, "outcomes": dist.len()}))
                }
                (None, None) => unreachable!("clap requires one of --input and --gaussian"),
            };
            Ok(json!({
                "command": "ce",
                "config": merge(json!({"utility": a.utility.to_string(), "gamma": a.gamma}), source),
                "mu": num(mu),
                "gamma": a.gamma,
                "utility": a.utility.to_string(),
            }))
        }
        Command::Index(a) => {
            let opts = a.solver.options();
            let dist = load_samples(&a.input)?;
            let shift = a.benchmark_rate * a.horizon as f64;
            let position = if shift == 0.0 { dist } else { dist.shift(-shift)? };
            let v = acceptability_index(&a.utility, &position, &opts)?;
            Ok(merge(
                json!({
                    "command": "index",
                    "config": {
                        "utility": a.utility.to_string(),
                        "input": a.input,
                        "benchmark_rate": a.benchmark_rate,
                        "horizon": a.horizon,
                        "solver": to_value(&opts)?,
                    },
                }),
                index_fields(&v),
            ))
        }
        Command::Perf(a) => {
            let candidate = StrategyCandidate::new("input", load_samples(&a.input)?);
            let v = crate::perf::finite_horizon_index(&a.utility, &candidate, a.benchmark)?;
            Ok(merge(
                json!({
                    "command": "perf",
                    "config": {
                        "utility": a.utility.to_string(),
                        "input": a.input,
                        "benchmark": a.benchmark,
                        "solver": to_value(&IndexOptions::default())?,
                    },
                }),
                index_fields(&v),
            ))
        }
        Command::Maximize(a) => {
            let candidates = a
                .candidates
                .iter()
                .map(|(label, path)| Ok(StrategyCandidate::new(label.clone(), load_samples(path)?)))
                .collect::<Result<Vec<_>>>()?;
            let sel = maximize_over_strategies(&a.utility, &candidates, a.benchmark)?;
            let ranking: Vec<Value> = sel
                .ranking
                .iter()
                .map(|r| merge(json!({"label": r.label}), index_fields(&r.index)))
                .collect();
            let inputs: Vec<Value> = a.candidates.iter().map(|(l, p)| json!({"label": l, "input": p})).collect();
            Ok(json!({
                "command": "maximize",
                "config": {"utility": a.utility.to_string(), "benchmark": a.benchmark, "candidates": inputs},
                "best": sel.best,
                "ranking": ranking,
            }))
        }
        Command::Longrun(a) => {
            let spec = a.model.resolve()?;
            let cfg = LongRunConfig { lambda_rate: a.lambda, t_grid: a.tgrid.0.clone(), seed: a.seed, n_paths: a.paths, law: a.law };
            let report = longrun_trajectory(&a.utility, &spec, &cfg)?;
            let trajectory: Vec<Value> = report
                .t_grid
                .iter()
                .zip(&report.alpha_values)
                .map(|(t, v)| merge(json!({"T": t}), index_fields(v)))
                .collect();
            Ok(json!({
                "command": "longrun",
                "config": {
                    "utility": a.utility.to_string(),
                    "model": to_value(&spec)?,
                    "lambda": a.lambda,
                    "tgrid": a.tgrid.0,
                    "paths": a.paths,
                    "seed": a.seed,
                    "law": a.law,
                    "resolved_law": report.law,
                },
                "trajectory": trajectory,
                "regime": report.regime,
                "liminf_estimate": num(report.liminf_estimate),
                "fit": to_value(&report.fit)?,
            }))
        }
        Command::Simulate(a) => {
            let spec = a.model.resolve()?;
            let series = simulate(&spec, a.n, a.seed)?;
            let mut out = json!({
                "command": "simulate",
                "config": {"model": to_value(&spec)?, "n": a.n, "seed": a.seed, "out": a.out},
                "n": series.len(),
            });
            match &a.out {
                Some(path) => {
                    let file = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                    let mut w = std::io::BufWriter::new(file);
                    series.write_csv(&mut w)?;
                    w.flush()?;
                }
                None => {
                    out["values"] = json!(series.values());
                }
            }
            Ok(out)
        }
        Command::Regularity(a) => {
            let grid = RegularityGrid::new(a.gamma_min, a.gamma_max, a.gamma_points, a.x_min, a.x_max, a.x_points, a.tol)?;
            let report = grid.certify(&a.utility)?;
            let grid_spec = json!({
                "gamma_min": a.gamma_min,
                "gamma_max": a.gamma_max,
                "gamma_points": a.gamma_points,
                "gamma_spacing": "log",
                "x_min": a.x_min,
                "x_max": a.x_max,
                "x_points": a.x_points,
                "x_spacing": "linear",
                "tol": a.tol,
            });
            Ok(json!({
                "command": "regularity",
                "config": {"utility": a.utility.to_string(), "grid": grid_spec},
                "verdict": report.verdict,
                "witness": to_value(&report.witness)?,
                "evaluated_points": report.evaluated_points,
                "skipped_points": report.skipped_points,
            }))
        }
        Command::Duality(a) => {
            let spec = PathModelSpec::iid_gaussian(a.m, a.sigma)?;
            let r = duality_check(&spec, a.lambda, a.seed, a.paths, a.horizon)?;
            Ok(json!({
                "command": "duality",
                "config": {"m": a.m, "sigma": a.sigma, "lambda": a.lambda, "paths": a.paths, "horizon": a.horizon, "seed": a.seed},
                "lhs": num(r.lhs),
                "rhs": num(r.rhs),
                "lhs_std_error": num(r.lhs_std_error),
                "rhs_std_error": num(r.rhs_std_error),
                "tolerance": num(r.tolerance),
                "closed_form": num(r.closed_form),
                "agrees": r.agrees(),
            }))
        }
    }
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Ce(_) => "ce",
        Command::Index(_) => "index",
        Command::Perf(_) => "perf",
        Command::Maximize(_) => "maximize",
        Command::Longrun(_) => "longrun",
        Command::Simulate(_) => "simulate",
        Command::Regularity(_) => "regularity",
        Command::Duality(_) => "duality",
    }
}

/// Configures the global thread pool from `UAI_THREADS`, if set.
pub fn init_threads() {
    if let Some(n) = std::env::var("UAI_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            // a pool built earlier in the process wins; that is harmless
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Runs the CLI on `argv` (including the program name), writing the report
/// to `stdout` and usage errors to `stderr`. Returns the exit code.
pub fn run_with<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    let name = command_name(&cli.command);
    // a malformed model description is a usage error, like an unknown flag
    let model = match &cli.command {
        Command::Longrun(a) => Some(&a.model),
        Command::Simulate(a) => Some(&a.model),
        _ => None,
    };
    if let Some(Err(e)) = model.map(ModelArgs::resolve) {
        let _ = writeln!(stderr, "error: invalid model: {e}");
        return 2;
    }
    let (code, doc) = match run_command(cli.command) {
        Ok(doc) => (0, doc),
        Err(e) => (1, json!({"command": name, "error": {"kind": e.kind(), "message": e.to_string()}})),
    };
    match to_json_line(&doc) {
        Ok(line) => {
            if stdout.write_all(line.as_bytes()).is_err() {
                return 1;
            }
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

/// [`run_with`] on the process's standard streams.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    init_threads();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
