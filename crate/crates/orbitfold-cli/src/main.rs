//! CLI for the quotient-map library: point projection and lifting plus all
//! verification suites, with JSON reports (or per-sample CSV rows).
//!
//! Exit codes: 0 pass, 1 verification failure (the report is still written),
//! 2 invalid input, 3 I/O error. `ORBITFOLD_THREADS` caps the worker pool
//! (0 or unset: automatic); results do not depend on the worker count.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use orbitfold::algebra::{fg_load, Field, FiniteGroup};
use orbitfold::quotient::{lift, project};
use orbitfold::spaces::{ProductPoint, SphereSpec, TargetPoint};
use orbitfold::verify::{
    derived_bounds_verify, jacobian_verify, join_exhaustive, local_model_verify,
    sphere_quotient_verify, JoinExhaustiveConfig, SuiteRun, Tolerances,
};

#[derive(Parser)]
#[command(name = "orbitfold", version, about = "Quotient maps of torus actions on products of spheres: projection, lifting, and verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Project a product point onto the quotient sphere.
    Project(ProjectArgs),
    /// Lift a target point to a preimage on the product of spheres.
    Lift(LiftArgs),
    /// Property suite for the sphere quotient map.
    VerifySphere(VerifySphereArgs),
    /// Exhaustive join-quotient bijectivity for a finite group.
    VerifyJoin(VerifyJoinArgs),
    /// Sampling verification of the local orbit-space model.
    VerifyLocal(VerifyLocalArgs),
    /// Jacobian determinants and submersion ranks against numeric oracles.
    Jacobian(JacobianArgs),
    /// Grid minimization of the derived lower bounds.
    VerifyBounds(VerifyBoundsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct ReportArgs {
    /// Number of seeded samples.
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    /// Master seed; per-sample generators derive from (seed, index).
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Tolerance override, repeatable: --tol name=value.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// json: the report; csv: one row per sample measurement.
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

#[derive(Args)]
struct ProjectArgs {
    /// Input product-point JSON file.
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LiftArgs {
    /// Input target-point JSON file.
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,
    /// Field of the sphere product: R, C, or H.
    #[arg(long)]
    field: String,
    /// Comma-separated factor dimensions, e.g. 4,4.
    #[arg(long)]
    dims: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifySphereArgs {
    #[arg(long)]
    field: String,
    #[arg(long)]
    dims: String,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args)]
struct VerifyJoinArgs {
    /// Group multiplication table file.
    #[arg(long)]
    group: PathBuf,
    /// Number of join factors (optional when --xsizes lists them all).
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated factor space sizes, e.g. 2,2; a single value is
    /// broadcast to k factors.
    #[arg(long)]
    xsizes: String,
    /// Grid points on [0,1] including the endpoints.
    #[arg(long, default_value_t = 5)]
    tgrid: usize,
    /// Enumeration cap in tuples.
    #[arg(long, default_value_t = 10_000_000)]
    tuple_cap: u64,
    /// Run the corrupted action (dropped inverse); the suite must then fail.
    #[arg(long)]
    negative_control: bool,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args)]
struct VerifyLocalArgs {
    #[arg(long)]
    field: String,
    /// Number of coordinates of K^k.
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args)]
struct JacobianArgs {
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args)]
struct VerifyBoundsArgs {
    /// Largest number of factors to minimize over.
    #[arg(long, default_value_t = 4)]
    kmax: usize,
    /// Grid subdivisions per axis.
    #[arg(long, default_value_t = 100)]
    resolution: usize,
    #[command(flatten)]
    report: ReportArgs,
}

enum CliError {
    /// exit 2
    Input(String),
    /// exit 3
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Io(m) => m,
        }
    }
}

fn read_file(path: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn parse_field(s: &str) -> Result<Field, CliError> {
    Field::parse(s).map_err(|e| CliError::Input(e.to_string()))
}

fn parse_dims(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|tok| tok.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Input(format!("--dims expects a comma-separated list, got {s:?}")))
}

fn parse_spec(field: &str, dims: &str) -> Result<SphereSpec, CliError> {
    let field = parse_field(field)?;
    let dims = parse_dims(dims)?;
    SphereSpec::new(field, dims).map_err(|e| CliError::Input(e.to_string()))
}

fn parse_tolerances(args: &[String]) -> Result<Tolerances, CliError> {
    let mut tol = Tolerances::default();
    for item in args {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("--tol expects name=value, got {item:?}")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("--tol {name}: {value:?} is not a number")))?;
        if !tol.set(name.trim(), value) {
            return Err(CliError::Input(format!("unknown tolerance {name:?}")));
        }
    }
    Ok(tol)
}

fn load_group(path: &PathBuf) -> Result<FiniteGroup, CliError> {
    let text = read_file(path)?;
    fg_load(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Writes the suite outcome in the requested format; pass/fail becomes the
/// exit code (0/1).
fn emit(run: SuiteRun, args: &ReportArgs) -> Result<ExitCode, CliError> {
    let text = match args.format {
        OutputFormat::Json => run.report.to_json_string(),
        OutputFormat::Csv => {
            let mut csv = String::from("index,check,error\n");
            for row in &run.rows {
                csv.push_str(&format!("{},{},{:e}\n", row.index, row.check, row.error));
            }
            csv
        }
    };
    write_output(&args.out, &text)?;
    Ok(if run.report.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Project(args) => {
            let text = read_file(&args.input)?;
            let point =
                ProductPoint::from_json_str(&text).map_err(|e| CliError::Input(e.to_string()))?;
            let target = project(&point);
            write_output(&args.out, &target.to_json_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Lift(args) => {
            let spec = parse_spec(&args.field, &args.dims)?;
            let text = read_file(&args.input)?;
            let target =
                TargetPoint::from_json_str(&text).map_err(|e| CliError::Input(e.to_string()))?;
            let lifted = lift(&target, &spec).map_err(|e| CliError::Input(e.to_string()))?;
            write_output(&args.out, &lifted.point.to_json_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifySphere(args) => {
            let spec = parse_spec(&args.field, &args.dims)?;
            let tol = parse_tolerances(&args.report.tol)?;
            let run = sphere_quotient_verify(&spec, args.report.samples, args.report.seed, &tol);
            emit(run, &args.report)
        }
        Command::VerifyJoin(args) => {
            let group = load_group(&args.group)?;
            let mut xsizes = parse_dims(&args.xsizes)?;
            if let Some(k) = args.k {
                if xsizes.len() == 1 {
                    xsizes = vec![xsizes[0]; k];
                } else if xsizes.len() != k {
                    return Err(CliError::Input(format!(
                        "--k {k} disagrees with --xsizes of length {}",
                        xsizes.len()
                    )));
                }
            }
            if xsizes.contains(&0) {
                return Err(CliError::Input("factor spaces must be nonempty".into()));
            }
            let cfg = JoinExhaustiveConfig {
                tgrid: args.tgrid,
                tuple_cap: args.tuple_cap,
                corrupt_action: args.negative_control,
            };
            let run = join_exhaustive(&group, &xsizes, &cfg)
                .map_err(|e| CliError::Input(e.to_string()))?;
            emit(run, &args.report)
        }
        Command::VerifyLocal(args) => {
            let field = parse_field(&args.field)?;
            let tol = parse_tolerances(&args.report.tol)?;
            let run =
                local_model_verify(field, args.k, args.report.samples, args.report.seed, &tol)
                    .map_err(|e| CliError::Input(e.to_string()))?;
            emit(run, &args.report)
        }
        Command::Jacobian(args) => {
            let tol = parse_tolerances(&args.report.tol)?;
            let mut run = jacobian_verify(args.report.samples, args.report.seed, &tol);
            let ranks = orbitfold::verify::rank_verify(args.report.samples, args.report.seed, &tol);
            // one report: fold the rank suite in
            run.report.pass &= ranks.report.pass;
            run.report.max_error = run.report.max_error.max(ranks.report.max_error);
            run.report.failures.extend(ranks.report.failures);
            if let (serde_json::Value::Object(a), serde_json::Value::Object(b)) =
                (&mut run.report.params, &ranks.report.params)
            {
                a.insert("rank".into(), serde_json::Value::Object(b.clone()));
            }
            run.rows.extend(ranks.rows);
            emit(run, &args.report)
        }
        Command::VerifyBounds(args) => {
            let tol = parse_tolerances(&args.report.tol)?;
            let run = derived_bounds_verify(args.kmax, args.resolution, &tol);
            emit(run, &args.report)
        }
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("ORBITFOLD_THREADS") {
        if let Ok(n) = threads.trim().parse::<usize>() {
            if n > 0 {
                // ignore failure: the pool may already be initialized in tests
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}
