use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use radlab::bounds::{BoundId, BoundParams, ParamGrid};
use radlab::genlab::Family;
use radlab::harness::compare::{run_compare, CompareConfig};
use radlab::harness::search::{run_search, SearchConfig};
use radlab::harness::{self, DimRange, OutputFormat, SuiteConfig};
use radlab::Result;

const EXIT_PASS: u8 = 0;
const EXIT_VIOLATION: u8 = 1;
const EXIT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "radlab", version, about = "Numerical radius bounds: verification, search and comparison")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the bound and lemma suites over random operands.
    Verify(VerifyArgs),
    /// Hill-climb operands to minimize the slack of one bound.
    Search(SearchArgs),
    /// Rank the single-operator upper bounds on w(T).
    Compare(CompareArgs),
    /// Sample the boundary of the field of values of a matrix.
    Fov(FovArgs),
}

#[derive(Args)]
struct GridArgs {
    /// λ values for bounds with a λ parameter.
    #[arg(long, default_value = "0,0.5,1,2,10")]
    grid_lambda: String,
    /// α values for the α-family bound.
    #[arg(long, default_value = "0,0.25,0.5,0.75,1")]
    grid_alpha: String,
    /// r values for bounds with an exponent r.
    #[arg(long, default_value = "1,1.5,2,3")]
    grid_r: String,
}

impl GridArgs {
    fn grid(&self) -> Result<ParamGrid> {
        Ok(ParamGrid {
            lambda: harness::parse_list(&self.grid_lambda)?,
            alpha: harness::parse_list(&self.grid_alpha)?,
            r: harness::parse_list(&self.grid_r)?,
        })
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated bound or lemma ids, or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Dimension range, e.g. `2..8` (inclusive).
    #[arg(long, default_value = "2..8")]
    dims: String,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Violation threshold: slack < −tol·max(1, |rhs|).
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[command(flatten)]
    grid: GridArgs,
    /// Comma-separated operand families (default: all trial families).
    #[arg(long)]
    families: Option<String>,
    /// Candidates scanned per dimension for Kantorovich operands.
    #[arg(long, default_value_t = 1000)]
    kantorovich_budget: usize,
    /// Report path; JSON is written to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// json or csv (default: from the --out extension).
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    bound: String,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Exponent r (default: the smallest admissible value).
    #[arg(long)]
    r: Option<f64>,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value_t = 10_000)]
    iters: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long, default_value = "ginibre")]
    family: String,
    #[arg(long, default_value_t = 4)]
    dim: usize,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    grid: GridArgs,
    /// Table path (.csv or .json); JSON is written to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FovArgs {
    /// Matrix JSON file.
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, default_value_t = 360)]
    points: usize,
    #[arg(long)]
    out: PathBuf,
}

fn verify(args: VerifyArgs) -> Result<u8> {
    let families = match &args.families {
        Some(list) => list
            .split(',')
            .map(|f| f.trim().parse::<Family>())
            .collect::<Result<Vec<_>>>()?,
        None => harness::default_families(),
    };
    let format = match (&args.format, &args.out) {
        (Some(f), _) => f.parse()?,
        (None, Some(p)) => OutputFormat::from_path(p),
        (None, None) => OutputFormat::Json,
    };
    let cfg = SuiteConfig {
        suites: harness::parse_suites(&args.suite)?,
        dims: args.dims.parse::<DimRange>()?,
        trials: args.trials,
        seed: args.seed,
        tol: args.tol,
        grid: args.grid.grid()?,
        families,
        kantorovich_budget: args.kantorovich_budget,
        format,
    };
    let report = harness::run_verify(&cfg)?;
    match &args.out {
        Some(path) => report.write(path, format)?,
        None => match format {
            OutputFormat::Json => print!("{}", report.to_json()?),
            OutputFormat::Csv => report.write_csv(std::io::stdout().lock())?,
        },
    }
    let s = &report.summary;
    eprintln!(
        "{}: {} suites x {} trials, {} passes, {} violations, {} skips, {} explicit-bound failures",
        s.status, s.suites, s.trials, s.passes, s.violations, s.skips, s.explicit_violations
    );
    for suite in report.suites.iter().filter(|s| s.violations > 0) {
        eprintln!("  {}: {} violating trials, min slack {:?}", suite.id, suite.violations, suite.min_slack);
    }
    Ok(if report.has_violations() { EXIT_VIOLATION } else { EXIT_PASS })
}

fn search(args: SearchArgs) -> Result<u8> {
    let bound: BoundId = args.bound.parse()?;
    let params = BoundParams {
        r: args.r.unwrap_or(bound.min_r()),
        lambda: args.lambda,
        alpha: args.alpha,
    };
    let result = run_search(&SearchConfig {
        bound,
        params,
        dim: args.dim,
        seed: args.seed,
        iters: args.iters,
    })?;
    let json = result.to_json()?;
    match &args.out {
        Some(path) => std::fs::write(path, &json)?,
        None => print!("{json}"),
    }
    match (&result.skipped, result.min_slack) {
        (Some(reason), _) => eprintln!("{bound}: skipped, {reason}"),
        (None, Some(slack)) => eprintln!("{bound} [{}]: min slack {slack:e} over {} evaluations", result.params, result.evaluations),
        (None, None) => {}
    }
    Ok(if result.is_violation(args.tol) { EXIT_VIOLATION } else { EXIT_PASS })
}

fn compare(args: CompareArgs) -> Result<u8> {
    let table = run_compare(&CompareConfig {
        family: args.family.parse()?,
        dim: args.dim,
        trials: args.trials,
        seed: args.seed,
        grid: args.grid.grid()?,
    })?;
    let json = || -> Result<String> { Ok(serde_json::to_string_pretty(&table)? + "\n") };
    match &args.out {
        Some(path) => match OutputFormat::from_path(path) {
            OutputFormat::Csv => table.write_csv(std::fs::File::create(path)?)?,
            OutputFormat::Json => std::fs::write(path, json()?)?,
        },
        None => print!("{}", json()?),
    }
    for o in &table.orderings {
        eprintln!("{}: {}/{}", o.ordering, o.holds, o.checks);
    }
    Ok(EXIT_PASS)
}

fn fov(args: FovArgs) -> Result<u8> {
    let summary = harness::run_fov(&args.matrix, args.points, &args.out)?;
    eprintln!("w = {:.12}, norm = {:.12}, {} boundary points", summary.w, summary.norm, summary.points);
    Ok(EXIT_PASS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS });
        }
    };
    let outcome = match cli.command {
        Command::Verify(a) => verify(a),
        Command::Search(a) => search(a),
        Command::Compare(a) => compare(a),
        Command::Fov(a) => fov(a),
    };
    match outcome {
        Ok(code) => {
            let _ = std::io::stdout().flush();
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("radlab: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
