//! Command-line front end for the pairing-optimization pipeline.
//!
//! Exit codes are stable for scripting: 0 success, 2 usage error,
//! 3 I/O failure, 4 input validation failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pairopt::equivalence::variance_optimize;
use pairopt::exact;
use pairopt::harness::{self, Distribution, ExperimentConfig, Flow};
use pairopt::heuristics::{combine, CombineConfig};
use pairopt::matrix::check_element_count;
use pairopt::observe::observe_transform;
use pairopt::{CompatibilityMatrix, PairError};

#[derive(Parser)]
#[command(
    name = "pairopt",
    version,
    about = "Pairing optimization: generate, transform, combine and benchmark compatibility matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random compatibility matrix file.
    Gen(GenArgs),
    /// Rewrite a matrix into another member of its equivalence class.
    Transform(TransformArgs),
    /// Run the PNN+P2-opt combining pipeline on a matrix file.
    Pair(PairArgs),
    /// Exhaustive optimum and pairing count (n <= 14).
    Exact(ExactArgs),
    /// Run the three-flow experiment and write result CSVs.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Element count (even, at least 4).
    #[arg(long)]
    n: usize,
    /// uniform01, poisson1, gaussian, binary or constant.
    #[arg(long, default_value = "uniform01")]
    dist: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output matrix file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, ValueEnum)]
enum TransformMode {
    /// Zero-first-row observation representative.
    Observe,
    /// Minimum-element-variance representative.
    Varopt,
}

#[derive(Args)]
struct TransformArgs {
    /// Input matrix file.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum)]
    mode: TransformMode,
    /// Output matrix file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PairArgs {
    /// Input matrix file the combiner runs on.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 600)]
    exchange_limit: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Score the derived pairing against this matrix too (performance 2<S,C>/n).
    #[arg(long)]
    ground_truth: Option<PathBuf>,
    /// Write the pairing as one `i-j` line per pair.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExactArgs {
    /// Input matrix file (n <= 14).
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON experiment config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Use the full sweep (n = 100..1000 step 100); multi-hour at the top end.
    #[arg(long)]
    paper_scale: bool,
    /// Element counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    dist: Option<String>,
    /// Subset of i,ii,iii, comma separated.
    #[arg(long, value_delimiter = ',')]
    flows: Option<Vec<String>>,
    #[arg(long)]
    exchange_limit: Option<usize>,
    #[arg(long)]
    master_seed: Option<u64>,
    /// Results CSV path; the summary CSV lands next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all logical processors).
    #[arg(long)]
    jobs: Option<usize>,
    /// Record measured wall times in the CSV (breaks byte-reproducibility).
    #[arg(long)]
    timings: bool,
}

enum CliError {
    Usage(String),
    Io(String),
    Validation(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Validation(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Validation(m) => m,
        }
    }
}

/// File-content problems are validation failures; everything else on the
/// read path is I/O.
fn load_matrix(path: &Path) -> Result<CompatibilityMatrix, CliError> {
    CompatibilityMatrix::read_from_path(path).map_err(|e| match e {
        PairError::Io(err) => CliError::Io(format!("{}: {err}", path.display())),
        other => CliError::Validation(format!("{}: {other}", path.display())),
    })
}

fn io_err(path: &Path, e: PairError) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => run_gen(args),
        Command::Transform(args) => run_transform(args),
        Command::Pair(args) => run_pair(args),
        Command::Exact(args) => run_exact(args),
        Command::Experiment(args) => run_experiment(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run_gen(args: GenArgs) -> Result<(), CliError> {
    check_element_count(args.n).map_err(|e| CliError::Usage(e.to_string()))?;
    let dist: Distribution = args
        .dist
        .parse()
        .map_err(|e: PairError| CliError::Usage(e.to_string()))?;
    let matrix =
        harness::generate(args.n, dist, args.seed).map_err(|e| CliError::Usage(e.to_string()))?;
    matrix
        .write_to_path(&args.out)
        .map_err(|e| io_err(&args.out, e))?;
    println!(
        "wrote {} matrix (n={}, seed={}) to {}",
        dist,
        args.n,
        args.seed,
        args.out.display()
    );
    Ok(())
}

fn run_transform(args: TransformArgs) -> Result<(), CliError> {
    let matrix = load_matrix(&args.input)?;
    let transformed = match args.mode {
        TransformMode::Observe => observe_transform(&matrix),
        TransformMode::Varopt => variance_optimize(&matrix),
    };
    transformed
        .write_to_path(&args.out)
        .map_err(|e| io_err(&args.out, e))?;
    println!("sigma2_element before = {}", matrix.sigma2_element());
    println!("sigma2_element after  = {}", transformed.sigma2_element());
    Ok(())
}

fn run_pair(args: PairArgs) -> Result<(), CliError> {
    if args.exchange_limit < 1 {
        return Err(CliError::Usage("exchange limit must be at least 1".into()));
    }
    let matrix = load_matrix(&args.input)?;
    let config = CombineConfig {
        exchange_limit: args.exchange_limit,
        rng_seed: args.seed,
        maximize: true,
    };
    let pairing = combine(&matrix, &config);
    let total = pairing
        .total_compatibility(&matrix)
        .expect("pairing built for this matrix");
    if let Some(out) = &args.out {
        pairing.write_to_path(out).map_err(|e| io_err(out, e))?;
    }
    for (a, b) in pairing.pairs() {
        println!("{a}-{b}");
    }
    println!("total = {total}");
    if let Some(gt_path) = &args.ground_truth {
        let ground_truth = load_matrix(gt_path)?;
        let gt_total = pairing
            .total_compatibility(&ground_truth)
            .map_err(|e| CliError::Validation(format!("{}: {e}", gt_path.display())))?;
        println!("performance = {}", 2.0 * gt_total / ground_truth.n() as f64);
    }
    Ok(())
}

fn run_exact(args: ExactArgs) -> Result<(), CliError> {
    let matrix = load_matrix(&args.input)?;
    if matrix.n() > exact::MAX_ENUMERATION_N {
        return Err(CliError::Usage(format!(
            "n={} exceeds the exhaustive-search cap of {}",
            matrix.n(),
            exact::MAX_ENUMERATION_N
        )));
    }
    let count = exact::pairing_count(matrix.n()).map_err(|e| CliError::Usage(e.to_string()))?;
    let (best, total) =
        exact::brute_force_optimum(&matrix).map_err(|e| CliError::Usage(e.to_string()))?;
    println!("n = {}", matrix.n());
    println!("pairings = {count}");
    println!("optimal_total = {total}");
    println!("optimal_pairing:");
    for (a, b) in best.pairs() {
        println!("{a}-{b}");
    }
    Ok(())
}

fn run_experiment(args: ExperimentArgs) -> Result<(), CliError> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::from_json_path(path).map_err(|e| match e {
            PairError::Io(err) => CliError::Io(format!("{}: {err}", path.display())),
            other => CliError::Usage(format!("{}: {other}", path.display())),
        })?,
        None if args.paper_scale => ExperimentConfig::paper_scale(),
        None => ExperimentConfig::desk_scale(),
    };
    if args.paper_scale && args.config.is_some() {
        config.n_values = ExperimentConfig::paper_scale().n_values;
    }

    if let Some(n) = args.n {
        config.n_values = n;
    }
    if let Some(trials) = args.trials {
        config.trials = trials;
    }
    if let Some(dist) = args.dist {
        config.distribution = dist
            .parse()
            .map_err(|e: PairError| CliError::Usage(e.to_string()))?;
    }
    if let Some(flows) = args.flows {
        config.flows = flows
            .iter()
            .map(|f| f.parse())
            .collect::<Result<Vec<Flow>, PairError>>()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    if let Some(l) = args.exchange_limit {
        config.exchange_limit = l;
    }
    if let Some(seed) = args.master_seed {
        config.master_seed = seed;
    }
    if let Some(out) = args.out {
        config.output_path = out;
    }
    config.include_timings = args.timings;
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let run = || harness::run_experiment(&config);
    let records = match args.jobs {
        Some(jobs) if jobs >= 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(run),
        Some(_) => return Err(CliError::Usage("--jobs must be at least 1".into())),
        None => run(),
    }
    .map_err(|e| match e {
        PairError::Io(err) => CliError::Io(err.to_string()),
        other => CliError::Usage(other.to_string()),
    })?;

    for row in harness::summarize(&records) {
        println!(
            "n={} dist={} flow={}: mean performance {:.6} (std {:.6}, {} trials)",
            row.n,
            row.distribution,
            row.flow,
            row.mean_performance,
            row.std_performance,
            row.trials
        );
    }
    println!(
        "wrote {} records to {} (summary: {})",
        records.len(),
        config.output_path.display(),
        harness::summary_path_for(&config.output_path).display()
    );
    Ok(())
}
