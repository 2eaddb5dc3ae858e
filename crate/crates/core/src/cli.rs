//! Command-line runner (`hra`).
//!
//! Exit codes: 0 success, 2 usage error, 3 numerical error.
//! `HRA_THREADS` caps the worker pool.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{case_by_key, BenchmarkCase, CaseParams, CASE_KEYS};
use crate::config::{ProblemDefinition, RunConfig};
use crate::error::{HraError, Result};
use crate::mcs::estimate_failure;
use crate::model::{standardize, HybridProblem};
use crate::pipeline::{analyze, AnalysisSettings};
use crate::report::{write_csv, write_curve_csv, write_json, RunReport};
use crate::uhlrf::{find_design_point, DesignPoint};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
const DEFAULT_SEED: u64 = 7;

#[derive(Parser, Debug)]
#[command(name = "hra", version, about = "Hybrid reliability analysis with random and uncertain variables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full analysis: design point, reduction, reliability interval.
    Run(RunArgs),
    /// Monte Carlo estimate with uncertain variables drawn uniformly.
    Mcs(McsArgs),
    /// Design point of the standardized problem.
    DesignPoint(DesignArgs),
    /// Reliability as a function of the error term σ.
    Curve(CurveArgs),
}

#[derive(Args, Debug)]
struct CaseArgs {
    /// Built-in case: linear, crank_slider, cantilever_tube.
    #[arg(long)]
    case: Option<String>,
    /// Problem definition file (alternative to --case).
    #[arg(long, conflicts_with = "case")]
    problem: Option<PathBuf>,
    /// Random variable count (linear case).
    #[arg(long)]
    m: Option<usize>,
    /// Uncertain variable count (linear case).
    #[arg(long)]
    n: Option<usize>,
    /// Time parameter (crank_slider).
    #[arg(long)]
    t: Option<f64>,
    /// Override the case's stress scale.
    #[arg(long)]
    stress_scale: Option<f64>,
}

#[derive(Args, Debug)]
struct SettingsArgs {
    /// key=value file with alpha_levels, quad_nodes, epsilon, fd_step, seed.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha_levels: Option<usize>,
    #[arg(long)]
    quad_nodes: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    fd_step: Option<f64>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report runtime_ms as 0 so repeated runs are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    case: CaseArgs,
    #[command(flatten)]
    settings: SettingsArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Emit per-iteration design-point records (JSON lines) on stderr.
    #[arg(long)]
    trace: bool,
    /// Also run the Monte Carlo oracle with this many samples.
    #[arg(long)]
    mcs_samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0.95)]
    confidence: f64,
}

#[derive(Args, Debug)]
struct McsArgs {
    #[command(flatten)]
    case: CaseArgs,
    #[command(flatten)]
    output: OutputArgs,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 0.95)]
    confidence: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DesignArgs {
    #[command(flatten)]
    case: CaseArgs,
    #[command(flatten)]
    settings: SettingsArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trace: bool,
}

#[derive(Args, Debug)]
struct CurveArgs {
    #[command(flatten)]
    case: CaseArgs,
    #[command(flatten)]
    settings: SettingsArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A problem resolved from either `--case` or `--problem`.
struct Resolved {
    label: String,
    problem: HybridProblem,
    params: Vec<(String, f64)>,
}

impl CaseArgs {
    fn resolve(&self) -> Result<Resolved> {
        let params = CaseParams { m: self.m, n: self.n, t: self.t, stress_scale: self.stress_scale };
        if let Some(path) = &self.problem {
            let mut def = ProblemDefinition::load(path)?;
            def.params.t = self.t.or(def.params.t);
            def.params.stress_scale = self.stress_scale.or(def.params.stress_scale);
            let problem = def.build()?;
            return Ok(Resolved { label: def.name.clone(), problem, params: Vec::new() });
        }
        let key = self.case.as_deref().ok_or_else(|| {
            HraError::InvalidParameter(format!("either --case or --problem is required (cases: {})", CASE_KEYS.join(", ")))
        })?;
        let BenchmarkCase { key, params: echoed, problem, .. } = case_by_key(key, &params)?;
        Ok(Resolved { label: key.to_string(), problem, params: echoed })
    }
}

impl SettingsArgs {
    fn resolve(&self) -> Result<(AnalysisSettings, RunConfig)> {
        let cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let mut s = AnalysisSettings::default();
        if let Some(v) = self.alpha_levels.or(cfg.alpha_levels) {
            s.alpha_levels = v;
        }
        if let Some(v) = self.quad_nodes.or(cfg.quad_nodes) {
            s.quad_nodes = v;
        }
        if let Some(v) = self.epsilon.or(cfg.epsilon) {
            s.solver.epsilon = v;
        }
        if let Some(v) = self.fd_step.or(cfg.fd_step) {
            s.fd_step = v;
        }
        Ok((s, cfg))
    }
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit(report: &RunReport, output: &OutputArgs) -> Result<()> {
    let mut out = open_out(&output.out)?;
    match output.format {
        Format::Csv => write_csv(std::slice::from_ref(report), &mut out)?,
        Format::Json => write_json(std::slice::from_ref(report), &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn emit_trace(dp: &DesignPoint) {
    let mut err = io::stderr().lock();
    for rec in &dp.trace {
        if let Ok(line) = serde_json::to_string(rec) {
            let _ = writeln!(err, "{line}");
        }
    }
}

fn elapsed_ms(start: Instant, no_timing: bool) -> u64 {
    if no_timing {
        0
    } else {
        start.elapsed().as_millis() as u64
    }
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let start = Instant::now();
    let resolved = args.case.resolve()?;
    let (settings, cfg) = args.settings.resolve()?;
    let seed = args.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let p = &resolved.problem;
    let analysis = analyze(p, &settings)?;
    if args.trace {
        if let Some(dp) = &analysis.design_point {
            emit_trace(dp);
        }
    }
    let mut report = RunReport::new(&resolved.label, p.m(), p.n(), seed).with_analysis(&analysis, &settings);
    report.params = resolved.params;
    if let Some(samples) = args.mcs_samples {
        report = report.with_mcs(&estimate_failure(p, samples, args.confidence, seed)?);
    }
    report.runtime_ms = elapsed_ms(start, args.output.no_timing);
    emit(&report, &args.output)
}

fn cmd_mcs(args: &McsArgs) -> Result<()> {
    let start = Instant::now();
    let resolved = args.case.resolve()?;
    let cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let seed = args.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let p = &resolved.problem;
    let est = estimate_failure(p, args.samples, args.confidence, seed)?;
    let mut report = RunReport::new(&resolved.label, p.m(), p.n(), seed).with_mcs(&est);
    report.params = resolved.params;
    report.runtime_ms = elapsed_ms(start, args.output.no_timing);
    emit(&report, &args.output)
}

#[derive(serde::Serialize)]
struct DesignOutput<'a> {
    case: &'a str,
    beta: f64,
    converged: bool,
    iterations: usize,
    variables: Vec<DesignVariable>,
}

#[derive(serde::Serialize)]
struct DesignVariable {
    name: String,
    kind: &'static str,
    standardized: f64,
    physical: f64,
}

fn cmd_design_point(args: &DesignArgs) -> Result<()> {
    let resolved = args.case.resolve()?;
    let (settings, _) = args.settings.resolve()?;
    let std_problem = standardize(resolved.problem.clone()).with_fd_step(settings.fd_step)?;
    let dp = find_design_point(&std_problem, &settings.solver)?;
    if args.trace {
        emit_trace(&dp);
    }
    let x = std_problem.from_u(&dp.u_star);
    let y = std_problem.from_delta(&dp.delta_star);
    let p = &resolved.problem;
    let mut variables = Vec::new();
    for (i, r) in p.randoms().iter().enumerate() {
        variables.push(DesignVariable { name: r.name.clone(), kind: "random", standardized: dp.u_star[i], physical: x[i] });
    }
    for (j, u) in p.uncertains().iter().enumerate() {
        variables.push(DesignVariable {
            name: u.name.clone(),
            kind: "uncertain",
            standardized: dp.delta_star[j],
            physical: y[j],
        });
    }
    let out_doc = DesignOutput { case: &resolved.label, beta: dp.beta, converged: dp.converged, iterations: dp.iterations, variables };
    let mut out = open_out(&args.out)?;
    match args.format {
        Format::Json => {
            let text = serde_json::to_string_pretty(&out_doc).map_err(|e| HraError::InvalidParameter(e.to_string()))?;
            writeln!(out, "{text}")?;
        }
        Format::Csv => {
            writeln!(out, "name,kind,standardized,physical")?;
            for v in &out_doc.variables {
                writeln!(out, "{},{},{:.16e},{:.16e}", v.name, v.kind, v.standardized, v.physical)?;
            }
            writeln!(out, "beta,summary,{:.16e},", dp.beta)?;
        }
    }
    out.flush()?;
    if !dp.converged {
        return Err(HraError::Accuracy(format!("design-point search did not converge in {} iterations", dp.iterations)));
    }
    Ok(())
}

fn cmd_curve(args: &CurveArgs) -> Result<()> {
    let resolved = args.case.resolve()?;
    let (settings, _) = args.settings.resolve()?;
    let analysis = analyze(&resolved.problem, &settings)?;
    let mut out = open_out(&args.out)?;
    write_curve_csv(&analysis.interval.curve, &mut out)?;
    out.flush()?;
    Ok(())
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("HRA_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n >= 1)
            .ok_or_else(|| HraError::InvalidParameter(format!("HRA_THREADS must be a positive integer, got '{v}'")))?;
        // A pool may already exist when called repeatedly in one process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    let result = configure_threads().and_then(|_| match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Mcs(a) => cmd_mcs(a),
        Command::DesignPoint(a) => cmd_design_point(a),
        Command::Curve(a) => cmd_curve(a),
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                EXIT_USAGE
            } else {
                EXIT_NUMERIC
            }
        }
    }
}
