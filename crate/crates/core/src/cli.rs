//! Command-line front end: `solve`, `sweep` and `verify`.
//!
//! Exit codes: 0 converged (or all verification cases passed), 1 input or
//! argument error, 2 penalty cap reached, 3 iteration budget exhausted,
//! 4 verification failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{
    create, load_covariance, load_samples, sample_covariance_ddof, write_matrix_csv, write_trace_csv,
    ResultDocument,
};
use crate::solver::solve;
use crate::sweep::{run_sweep, SummaryRow, SweepSpec};
use crate::types::{ProblemSpec, SolverConfig, SymMatrix};
use crate::verify::run_agreement_suite;

pub const EXIT_INPUT_ERROR: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "glinf",
    version,
    about = "Graphical lasso with an element-wise bound on off-diagonal precision entries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one instance.
    Solve(SolveArgs),
    /// Solve a (gamma, lambda) grid.
    Sweep(SweepArgs),
    /// Check the solver against the 2x2 reference solver on random instances.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Observations, one row each; the covariance is computed from them.
    #[arg(long, value_name = "PATH", conflicts_with = "covariance", required_unless_present = "covariance")]
    samples: Option<PathBuf>,
    /// Square symmetric covariance matrix.
    #[arg(long, value_name = "PATH")]
    covariance: Option<PathBuf>,
    /// Covariance normalization 1/(n - ddof).
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
    ddof: u8,
}

#[derive(Debug, Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 1e-8)]
    epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    rho0: f64,
    #[arg(long, default_value_t = 20)]
    doubling_interval: usize,
    #[arg(long, default_value_t = 1e6)]
    rho_max: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    /// Also require the primal residual to fall below epsilon.
    #[arg(long)]
    strict: bool,
    /// Stop on the multiplier test alone.
    #[arg(long)]
    no_consensus_guard: bool,
}

impl SolverArgs {
    fn config(&self, trace: bool) -> SolverConfig {
        SolverConfig {
            rho0: self.rho0,
            doubling_interval: self.doubling_interval,
            rho_max: self.rho_max,
            epsilon: self.epsilon,
            max_iters: self.max_iters,
            trace,
            strict: self.strict,
            consensus_guard: !self.no_consensus_guard,
        }
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    gamma: f64,
    #[arg(long)]
    lambda: f64,
    #[command(flatten)]
    solver: SolverArgs,
    /// Result destination (stdout if omitted).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Per-iteration diagnostics as CSV.
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Comma-separated ascending list.
    #[arg(long, value_delimiter = ',', required = true)]
    gammas: Vec<f64>,
    /// Comma-separated ascending list.
    #[arg(long, value_delimiter = ',', required = true)]
    lambdas: Vec<f64>,
    /// Start every grid point from the identity.
    #[arg(long)]
    no_warm_start: bool,
    /// Worker threads; lambda rows run in parallel.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
    cases: u64,
    #[command(flatten)]
    solver: SolverArgs,
}

/// Configures stderr logging from `GLINF_LOG` (`quiet`, `info`, `debug`).
pub fn init_logging() {
    let level = match std::env::var("GLINF_LOG").as_deref() {
        Ok("debug") => log::LevelFilter::Debug,
        Ok("info") => log::LevelFilter::Info,
        _ => log::LevelFilter::Off,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .target(env_logger::Target::Stderr)
        .try_init();
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT_ERROR } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Solve(a) => run_solve(&a, stdout),
        Command::Sweep(a) => run_sweep_cmd(&a, stdout),
        Command::Verify(a) => run_verify(&a, stdout),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INPUT_ERROR
        }
    }
}

fn load_input(input: &InputArgs) -> Result<SymMatrix> {
    match (&input.samples, &input.covariance) {
        (Some(path), None) => sample_covariance_ddof(&load_samples(path)?, input.ddof as usize),
        (None, Some(path)) => load_covariance(path),
        _ => Err(Error::InvalidConfig(
            "exactly one of --samples and --covariance is required".into(),
        )),
    }
}

fn write_output(out: &Option<PathBuf>, stdout: &mut dyn Write, bytes: &[u8]) -> Result<()> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Io { path, source }
    };
    match out {
        Some(path) => create(path)?.write_all(bytes).map_err(io_err(path)),
        None => stdout.write_all(bytes).map_err(io_err(Path::new("<stdout>"))),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("result documents always serialize");
    s.push('\n');
    s
}

fn run_solve(args: &SolveArgs, stdout: &mut dyn Write) -> Result<i32> {
    let spec = ProblemSpec::new(load_input(&args.input)?, args.gamma, args.lambda)?;
    let config = args.solver.config(args.trace.is_some());
    config.validate()?;
    let result = solve(&spec, &config)?;

    if let (Some(path), Some(trace)) = (&args.trace, &result.trace) {
        write_trace_csv(trace, create(path)?).map_err(|source| Error::Csv {
            path: path.clone(),
            source,
        })?;
    }
    let body = match args.format {
        Format::Json => to_json(&ResultDocument::from_result(&result)).into_bytes(),
        Format::Csv => {
            let mut buf = Vec::new();
            write_matrix_csv(&result.theta_star, &mut buf).expect("writing to memory");
            buf
        }
    };
    write_output(&args.out, stdout, &body)?;
    Ok(result.termination.exit_code())
}

#[derive(Serialize)]
struct SweepRecord {
    gamma: f64,
    lambda: f64,
    result: ResultDocument,
}

#[derive(Serialize)]
struct SweepDocument {
    points: Vec<SweepRecord>,
    summary: Vec<SummaryRow>,
}

fn run_sweep_cmd(args: &SweepArgs, stdout: &mut dyn Write) -> Result<i32> {
    let covariance = load_input(&args.input)?;
    let sweep = SweepSpec::new(args.gammas.clone(), args.lambdas.clone(), !args.no_warm_start)?;
    let config = args.solver.config(false);
    config.validate()?;
    let points = run_sweep(&covariance, &sweep, &config, args.jobs)?;

    let body = match args.format {
        Format::Json => {
            let doc = SweepDocument {
                summary: points.iter().map(|p| p.summary()).collect(),
                points: points
                    .iter()
                    .map(|p| SweepRecord {
                        gamma: p.gamma,
                        lambda: p.lambda,
                        result: ResultDocument::from_result(&p.result),
                    })
                    .collect(),
            };
            to_json(&doc).into_bytes()
        }
        Format::Csv => {
            let p = covariance.order();
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header: Vec<String> = ["gamma", "lambda", "objective", "iters", "termination"]
                .iter()
                .map(|s| s.to_string())
                .collect();
            header.extend((0..p).flat_map(|i| (0..p).map(move |j| format!("theta_{i}_{j}"))));
            let csv_err = |source| Error::Csv {
                path: PathBuf::from("<sweep>"),
                source,
            };
            w.write_record(&header).map_err(csv_err)?;
            for pt in &points {
                let s = pt.summary();
                let mut rec = vec![
                    s.gamma.to_string(),
                    s.lambda.to_string(),
                    s.objective.map_or_else(String::new, |v| v.to_string()),
                    s.iters.to_string(),
                    s.termination.to_string(),
                ];
                rec.extend(pt.result.theta_star.to_row_major().iter().map(f64::to_string));
                w.write_record(&rec).map_err(csv_err)?;
            }
            w.into_inner().expect("in-memory csv writer")
        }
    };
    write_output(&args.out, stdout, &body)?;
    Ok(points
        .iter()
        .map(|p| p.result.termination.exit_code())
        .max()
        .unwrap_or(0))
}

fn run_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> Result<i32> {
    let config = args.solver.config(false);
    config.validate()?;
    let report = run_agreement_suite(args.seed, args.cases as usize, &config)?;
    write_output(&None, stdout, report.render().as_bytes())?;
    Ok(if report.all_passed() { 0 } else { EXIT_VERIFY_FAILED })
}
