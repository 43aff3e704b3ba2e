//! Command-line front end.
//!
//! Exit codes: 0 ok, 1 internal invariant failure, 2 malformed input or
//! usage, 3 atom/oracle budget exceeded, 4 verification failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sparse_ot::expansion::ExpansionError;
use sparse_ot::generate::{generate_instance, GenConfig, WeightMode};
use sparse_ot::oracle::brute_force_assignment;
use sparse_ot::plan::{plan_stats, verify_plan, PlanStats, TransportPlan};
use sparse_ot::solver::{atom_cost_matrix, Assignment, CostKind, CostSpec, SolverError};
use sparse_ot::svg::{render_figure, FigureConfig};
use sparse_ot::{
    expansion, solve_instance, Instance, SolveError, SolveOptions, SolvePath, Solved,
    DEFAULT_MAX_ATOMS,
};

/// Bench runs both paths; the expanded one is cubic in the atom count, so
/// cap it well below the general atom budget.
const BENCH_MAX_ATOMS: usize = 2048;

#[derive(Parser)]
#[command(name = "sparse-ot", version, about = "Sparse transport plans between discrete measures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and emit the transport plan.
    Solve(SolveArgs),
    /// Generate a seeded random instance.
    Gen(GenArgs),
    /// Check a plan against an instance; exit 4 if any check fails.
    Verify(VerifyArgs),
    /// Render a plan over planar points as an SVG figure.
    Figure(FigureArgs),
    /// Solve a tiny instance by exhaustive search (audit tool).
    Oracle(OracleArgs),
    /// Time the expanded and compressed paths; CSV on stdout.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CostArg {
    Euclidean,
    Sqeuclidean,
    Manhattan,
    /// Use the explicit matrix from the instance file.
    Matrix,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PathArg {
    Auto,
    Expanded,
    Compressed,
}

impl From<PathArg> for SolvePath {
    fn from(arg: PathArg) -> SolvePath {
        match arg {
            PathArg::Auto => SolvePath::Auto,
            PathArg::Expanded => SolvePath::Expanded,
            PathArg::Compressed => SolvePath::Compressed,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WeightArg {
    Uniform,
    Rational,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance JSON file.
    #[arg(long)]
    input: PathBuf,
    /// Plan JSON destination; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Override the instance's cost.
    #[arg(long, value_enum)]
    cost: Option<CostArg>,
    /// Refuse expansions needing more atoms than this.
    #[arg(long, default_value_t = DEFAULT_MAX_ATOMS)]
    max_atoms: u64,
    #[arg(long, value_enum, default_value_t = PathArg::Auto)]
    path: PathArg,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = WeightArg::Uniform)]
    weights: WeightArg,
    /// Largest denominator for rational weights.
    #[arg(long, default_value_t = 60)]
    max_denominator: u64,
    #[arg(long, value_enum, default_value_t = CostArg::Euclidean)]
    cost: CostArg,
    /// Instance JSON destination; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
}

#[derive(Args)]
struct FigureArgs {
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    instance: PathBuf,
    /// SVG destination.
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = 800)]
    width: u32,
    #[arg(long, default_value_t = 800)]
    height: u32,
}

#[derive(Args)]
struct OracleArgs {
    /// Instance JSON file; needs at most 9 atoms.
    #[arg(long)]
    input: PathBuf,
    /// Plan JSON destination; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MAX_ATOMS)]
    max_atoms: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated sizes: "256" means 256x256, "20x30" is explicit.
    #[arg(long, default_value = "64,128,256")]
    sizes: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = CostArg::Euclidean)]
    cost: CostArg,
}

enum CliError {
    Usage(String),
    Budget(String),
    Verification(String),
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Internal(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Verification(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(msg)
            | CliError::Budget(msg)
            | CliError::Verification(msg)
            | CliError::Internal(msg) => msg,
        }
    }
}

fn from_solve_error(err: SolveError) -> CliError {
    match err {
        SolveError::Expansion(ExpansionError::AtomBudgetExceeded { .. }) => {
            CliError::Budget(err.to_string())
        }
        SolveError::Solver(
            SolverError::CostShapeMismatch { .. }
            | SolverError::PointDimensionMismatch { .. }
            | SolverError::NonFinite { .. }
            | SolverError::Ragged
            | SolverError::Empty,
        ) => CliError::Usage(err.to_string()),
        other => CliError::Internal(other.to_string()),
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Figure(args) => cmd_figure(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Bench(args) => cmd_bench(args),
    };
    if let Err(err) = result {
        eprintln!("error: {}", err.message());
        std::process::exit(err.exit_code());
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content)
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, CliError> {
    Instance::from_json(&read_file(path)?).map_err(|e| CliError::Usage(e.to_string()))
}

fn load_plan(path: &Path) -> Result<TransportPlan, CliError> {
    serde_json::from_str(&read_file(path)?)
        .map_err(|e| CliError::Usage(format!("invalid plan JSON: {e}")))
}

/// Applies a `--cost` override on top of the instance's own cost.
fn resolve_cost(instance_cost: &CostSpec, arg: Option<CostArg>) -> Result<CostSpec, CliError> {
    match arg {
        None => Ok(instance_cost.clone()),
        Some(CostArg::Euclidean) => Ok(CostSpec::Euclidean),
        Some(CostArg::Sqeuclidean) => Ok(CostSpec::SqEuclidean),
        Some(CostArg::Manhattan) => Ok(CostSpec::Manhattan),
        Some(CostArg::Matrix) => match instance_cost {
            CostSpec::Explicit(_) => Ok(instance_cost.clone()),
            _ => Err(CliError::Usage(
                "--cost matrix requires an explicit matrix in the instance file".into(),
            )),
        },
    }
}

fn plan_to_json(plan: &TransportPlan) -> String {
    let mut text = serde_json::to_string_pretty(plan).expect("plan always serializes");
    text.push('\n');
    text
}

fn stats_summary(solved: &Solved, stats: &PlanStats) -> String {
    let path = if solved.used_compressed { "compressed" } else { "expanded" };
    let bound_out = stats.bound_out.iter().max().copied().unwrap_or(0);
    let bound_in = stats.bound_in.iter().max().copied().unwrap_or(0);
    format!(
        "m={} n={} atoms={} path={path}\n\
         support_size={} cost={:.9}\n\
         max_out={}<={bound_out} max_in={}<={bound_in}\n",
        stats.out_degree.len(),
        stats.in_degree.len(),
        solved.atoms,
        stats.support_size,
        stats.cost,
        stats.max_out,
        stats.max_in,
    )
}

fn cmd_solve(args: SolveArgs) -> Result<(), CliError> {
    let mut instance = load_instance(&args.input)?;
    instance.cost = resolve_cost(&instance.cost, args.cost)?;
    let options = SolveOptions {
        max_atoms: args.max_atoms,
        path: args.path.into(),
    };
    let solved = solve_instance(&instance, &options).map_err(from_solve_error)?;
    let stats = plan_stats(&solved.plan, &instance.mu, &instance.nu)
        .map_err(|e| CliError::Internal(format!("produced plan fails its own contract: {e}")))?;

    let json = plan_to_json(&solved.plan);
    let summary = stats_summary(&solved, &stats);
    match &args.output {
        Some(path) => {
            write_file(path, &json)?;
            print!("{summary}");
        }
        None => {
            // Keep stdout machine-readable; the summary goes to stderr.
            print!("{json}");
            eprint!("{summary}");
        }
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<(), CliError> {
    let weights = match args.weights {
        WeightArg::Uniform => WeightMode::Uniform,
        WeightArg::Rational => WeightMode::RandomRational {
            max_denominator: args.max_denominator,
        },
    };
    let cost = match args.cost {
        CostArg::Euclidean => CostKind::Euclidean,
        CostArg::Sqeuclidean => CostKind::SqEuclidean,
        CostArg::Manhattan => CostKind::Manhattan,
        CostArg::Matrix => {
            return Err(CliError::Usage(
                "gen produces named costs; explicit matrices are for hand-written files".into(),
            ))
        }
    };
    let config = GenConfig {
        m: args.m,
        n: args.n,
        dim: args.dim,
        seed: args.seed,
        weights,
        cost,
    };
    let instance = generate_instance(&config).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut json = instance.to_json_pretty();
    json.push('\n');
    match &args.output {
        Some(path) => write_file(path, &json),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let instance = load_instance(&args.instance)?;
    let plan = load_plan(&args.plan)?;
    let report = verify_plan(&plan, &instance.mu, &instance.nu, &instance.cost, None);

    match args.format {
        ReportFormat::Text => {
            for check in &report.checks {
                let verdict = if check.passed { "PASS" } else { "FAIL" };
                println!("[{verdict}] {}: {}", check.name, check.detail);
            }
            println!("overall: {}", if report.passed() { "PASS" } else { "FAIL" });
        }
        ReportFormat::Json => {
            let doc = serde_json::json!({
                "passed": report.passed(),
                "checks": report.checks,
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("report serializes"));
        }
    }
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect();
        Err(CliError::Verification(format!(
            "verification failed: {}",
            failed.join(", ")
        )))
    }
}

fn cmd_figure(args: FigureArgs) -> Result<(), CliError> {
    let instance = load_instance(&args.instance)?;
    let plan = load_plan(&args.plan)?;
    let config = FigureConfig {
        width: args.width,
        height: args.height,
    };
    let svg = render_figure(&plan, &instance.mu, &instance.nu, &config)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    write_file(&args.output, &svg)
}

fn cmd_oracle(args: OracleArgs) -> Result<(), CliError> {
    let instance = load_instance(&args.input)?;
    let expanded = expansion::expand(&instance.mu, &instance.nu, args.max_atoms)
        .map_err(|e| CliError::Budget(e.to_string()))?;
    let matrix =
        atom_cost_matrix(&expanded, &instance.cost).map_err(|e| CliError::Usage(e.to_string()))?;
    let truth = brute_force_assignment(&matrix).map_err(|e| CliError::Budget(e.to_string()))?;
    let assignment = Assignment {
        perm: truth.perm,
        cost: truth.cost,
        exact_cost: truth.exact_cost,
    };
    let plan = sparse_ot::plan::collapse(&expanded, &assignment)
        .map_err(|e| CliError::Internal(e.to_string()))?;

    let json = plan_to_json(&plan);
    match &args.output {
        Some(path) => write_file(path, &json)?,
        None => print!("{json}"),
    }
    eprintln!("oracle_cost={:.9} atoms={}", plan.cost, expanded.atoms());
    Ok(())
}

fn parse_sizes(text: &str) -> Result<Vec<(usize, usize)>, CliError> {
    let mut sizes = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        let (m, n) = match token.split_once('x') {
            Some((m, n)) => (m, n),
            None => (token, token),
        };
        let parse = |s: &str| {
            s.parse::<usize>()
                .ok()
                .filter(|&v| v >= 1)
                .ok_or_else(|| CliError::Usage(format!("invalid size token {token:?}")))
        };
        sizes.push((parse(m)?, parse(n)?));
    }
    if sizes.is_empty() {
        return Err(CliError::Usage("no sizes given".into()));
    }
    Ok(sizes)
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let sizes = parse_sizes(&args.sizes)?;
    let cost = match args.cost {
        CostArg::Euclidean => CostKind::Euclidean,
        CostArg::Sqeuclidean => CostKind::SqEuclidean,
        CostArg::Manhattan => CostKind::Manhattan,
        CostArg::Matrix => return Err(CliError::Usage("bench uses named costs".into())),
    };

    println!("m,n,atoms,expanded_ms,compressed_ms,expanded_cost,compressed_cost");
    for (index, &(m, n)) in sizes.iter().enumerate() {
        let counts = expansion::expansion_counts(m, n);
        if counts.atoms as usize > BENCH_MAX_ATOMS {
            return Err(CliError::Budget(format!(
                "size {m}x{n} needs {} atoms; bench caps the expanded path at {BENCH_MAX_ATOMS}",
                counts.atoms
            )));
        }
        let config = GenConfig {
            m,
            n,
            dim: 2,
            seed: args.seed.wrapping_add(index as u64),
            weights: WeightMode::Uniform,
            cost,
        };
        let instance = generate_instance(&config).map_err(|e| CliError::Usage(e.to_string()))?;

        let start = Instant::now();
        let expanded = solve_instance(
            &instance,
            &SolveOptions { path: SolvePath::Expanded, ..Default::default() },
        )
        .map_err(from_solve_error)?;
        let expanded_ms = start.elapsed().as_secs_f64() * 1e3;

        let start = Instant::now();
        let compressed = solve_instance(
            &instance,
            &SolveOptions { path: SolvePath::Compressed, ..Default::default() },
        )
        .map_err(from_solve_error)?;
        let compressed_ms = start.elapsed().as_secs_f64() * 1e3;

        let diff = (expanded.plan.cost - compressed.plan.cost).abs();
        let tol = 1e-9 * expanded.plan.cost.abs().max(1.0);
        if diff > tol {
            return Err(CliError::Internal(format!(
                "paths disagree at {m}x{n}: expanded {} vs compressed {}",
                expanded.plan.cost, compressed.plan.cost
            )));
        }
        println!(
            "{m},{n},{},{expanded_ms:.3},{compressed_ms:.3},{:.9},{:.9}",
            expanded.atoms, expanded.plan.cost, compressed.plan.cost
        );
    }
    Ok(())
}
