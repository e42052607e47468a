//! `sdist`: sparse projections, solvers, and experiment harnesses over
//! discrete distributions.
//!
//! Exit codes: 0 on success, 2 on usage errors (clap), 1 on runtime
//! errors.

use clap::{Args, Parser, Subcommand, ValueEnum};
use sdist::io::{read_function, write_function, write_trace_csv};
use sdist::measures::Distribution;
use sdist::objectives::{KlObjective, L2Objective, Objective};
use sdist::projection::{exact_sparse_project, greedy_sparse_project, TieBreak};
use sdist::solvers::{dist_iht, InitMode, SolverConfig};
use sdist_cli::experiments::{
    run_experiment, CompressParams, ExperimentSpec, HistogramSource, ObjectiveKind, PointSource,
    PrototypeParams, SimulateParams,
};
use sdist_cli::{data, CliError};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "sdist",
    about = "Sparse discrete distributions: projections, thresholded descent, and experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Greedy,
    Exact,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum TieArg {
    Lowest,
    Random,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    L2,
    Kl,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum InitArg {
    Greedy,
    Uniform,
    Given,
}

#[derive(Subcommand)]
enum Command {
    /// Project a function file onto the k-sparse distribution set.
    Project(ProjectArgs),
    /// Minimize an objective over k-sparse distributions.
    Solve(SolveArgs),
    /// Simulated comparison of solvers on random sparse targets.
    Simulate(SimulateArgs),
    /// Moment-preserving histogram compression experiment.
    Compress(CompressArgs),
    /// Kernel-MMD prototype selection experiment.
    Prototypes(PrototypesArgs),
    /// Decide whether a subset of the given integers sums to zero.
    Sspcheck(SspcheckArgs),
}

#[derive(Args)]
struct ProjectArgs {
    /// Input function file (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Sparsity level.
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Greedy)]
    method: MethodArg,
    #[arg(long, value_enum, default_value_t = TieArg::Lowest)]
    tie: TieArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the projected distribution here (function file).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    objective: ObjectiveArg,
    /// Target distribution (function file).
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    k: usize,
    /// Initial step size.
    #[arg(long, default_value_t = 0.008)]
    mu: f64,
    #[arg(long, default_value_t = 300)]
    iters: usize,
    #[arg(long, value_enum, default_value_t = InitArg::Uniform)]
    init: InitArg,
    /// Initial distribution for --init given (function file).
    #[arg(long)]
    init_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the iteration trace CSV here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 15)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 7)]
    k: usize,
    #[arg(long, default_value_t = 20)]
    runs: usize,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::L2)]
    objective: ObjectiveArg,
    #[arg(long, default_value_t = 0.008)]
    mu: f64,
    #[arg(long, default_value_t = 300)]
    iters: usize,
    /// Lattice positions carrying target mass.
    #[arg(long, default_value_t = 50)]
    positions: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Record wall-clock times (breaks byte-for-byte reproducibility).
    #[arg(long, default_value_t = false)]
    timing: bool,
}

#[derive(Args)]
struct CompressArgs {
    /// CSV of raw values to bin (one per line).
    #[arg(long, conflicts_with = "synthetic")]
    data: Option<PathBuf>,
    /// Use the built-in heavy-tailed synthetic source.
    #[arg(long)]
    synthetic: bool,
    /// Synthetic sample count.
    #[arg(long, default_value_t = 200_000)]
    samples: usize,
    #[arg(long, default_value_t = 1000)]
    bins: usize,
    #[arg(long, default_value_t = 1000.0)]
    bin_width: f64,
    /// Sensing rows.
    #[arg(long, default_value_t = 100)]
    rows: usize,
    #[arg(long, default_value_t = 50)]
    k: usize,
    /// Lasso regularization weight.
    #[arg(long, default_value_t = 1e-3)]
    gamma_lasso: f64,
    /// Training matrices.
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Test matrices per training matrix.
    #[arg(long, default_value_t = 20)]
    tests: usize,
    #[arg(long, default_value_t = 300)]
    iters: usize,
    /// Seeded descent restarts per training matrix.
    #[arg(long, default_value_t = 3)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = false)]
    timing: bool,
}

#[derive(Args)]
struct PrototypesArgs {
    /// CSV of points (comma-separated coordinates per line).
    #[arg(long, requires = "labels", conflicts_with = "synthetic")]
    data: Option<PathBuf>,
    /// CSV of integer labels (one per line).
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Use built-in Gaussian blobs instead of files.
    #[arg(long)]
    synthetic: bool,
    /// Points per synthetic class.
    #[arg(long, default_value_t = 50)]
    per_class: usize,
    /// Synthetic blob spread.
    #[arg(long, default_value_t = 0.6)]
    spread: f64,
    /// Prototypes to select.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// RBF bandwidth; defaults to the median-distance heuristic.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 0.7)]
    train_fraction: f64,
    #[arg(long, default_value_t = 200)]
    iters: usize,
    /// Seeded solver restarts (best training objective wins).
    #[arg(long, default_value_t = 5)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = false)]
    timing: bool,
}

#[derive(Args)]
struct SspcheckArgs {
    /// Comma-separated integers, e.g. "-3,1,2".
    #[arg(long, allow_hyphen_values = true)]
    set: String,
}

fn open_reader(path: &Path) -> Result<BufReader<File>, CliError> {
    Ok(BufReader::new(File::open(path)?))
}

fn tie_break(tie: TieArg, seed: u64) -> TieBreak {
    match tie {
        TieArg::Lowest => TieBreak::LowestIndex,
        TieArg::Random => TieBreak::Random { seed },
    }
}

fn run_project(args: &ProjectArgs) -> Result<(), CliError> {
    let function = read_function(open_reader(&args.input)?)?;
    let tie = tie_break(args.tie, args.seed);
    let result = match args.method {
        MethodArg::Greedy => greedy_sparse_project(&function, args.k, &tie)?,
        MethodArg::Exact => exact_sparse_project(&function, args.k)?,
    };
    println!("support: {}", result.result.support());
    println!("distance_sq: {}", result.distance_sq);
    if let Some(out) = &args.out {
        let file = File::create(out)?;
        write_function(BufWriter::new(file), result.result.dist().as_function())?;
    }
    Ok(())
}

fn run_solve(args: &SolveArgs) -> Result<(), CliError> {
    let target = Distribution::new(read_function(open_reader(&args.target)?)?)?;
    let objective: Box<dyn Objective> = match args.objective {
        ObjectiveArg::L2 => Box::new(L2Objective::new(target)),
        ObjectiveArg::Kl => Box::new(KlObjective::new(target)?),
    };
    let mut cfg = SolverConfig::new(args.mu, args.iters);
    cfg.seed = args.seed;
    cfg.init = match args.init {
        InitArg::Uniform => InitMode::UniformOnRandomSupport,
        InitArg::Greedy => InitMode::GreedySelection,
        InitArg::Given => {
            let path = args.init_file.as_ref().ok_or_else(|| {
                CliError::Invalid("--init given requires --init-file".into())
            })?;
            let init = Distribution::new(read_function(open_reader(path)?)?)?;
            InitMode::GivenDistribution(init)
        }
    };
    let result = dist_iht(objective.as_ref(), args.k, &cfg)?;
    println!("best_objective: {}", result.best_objective);
    println!("support: {}", result.best.support());
    if let Some(path) = &args.trace {
        let file = File::create(path)?;
        write_trace_csv(BufWriter::new(file), &result.trace)?;
    }
    Ok(())
}

fn write_table(path: &Path, table: &sdist_cli::ResultsTable) -> Result<(), CliError> {
    let file = File::create(path)?;
    table.write_csv(BufWriter::new(file))?;
    Ok(())
}

fn run_sspcheck(args: &SspcheckArgs, stdout: &mut impl Write) -> Result<(), CliError> {
    let ground_set = args
        .set
        .split(',')
        .map(|part| {
            part.trim().parse::<i64>().map_err(|e| {
                CliError::Invalid(format!("bad integer {part:?} in --set: {e}"))
            })
        })
        .collect::<Result<Vec<i64>, _>>()?;
    match sdist::hardness::subset_sum_decide(&ground_set)? {
        Some(subset) => {
            let rendered: Vec<String> = subset.iter().map(|e| e.to_string()).collect();
            writeln!(stdout, "subset: {}", rendered.join(","))?;
        }
        None => writeln!(stdout, "none")?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Project(args) => run_project(args),
        Command::Solve(args) => run_solve(args),
        Command::Simulate(args) => {
            let params = SimulateParams {
                n: args.n,
                m: args.m,
                k: args.k,
                objective: match args.objective {
                    ObjectiveArg::L2 => ObjectiveKind::L2,
                    ObjectiveArg::Kl => ObjectiveKind::Kl,
                },
                runs: args.runs,
                positions: args.positions,
                mu0: args.mu,
                iters: args.iters,
                seed: args.seed,
                timing: args.timing,
            };
            let spec = match params.objective {
                ObjectiveKind::L2 => ExperimentSpec::SimulateL2(params),
                ObjectiveKind::Kl => ExperimentSpec::SimulateKl(params),
            };
            let table = run_experiment(&spec)?;
            write_table(&args.out, &table)
        }
        Command::Compress(args) => {
            let source = match (&args.data, args.synthetic) {
                (Some(path), false) => {
                    HistogramSource::Values(data::parse_value_rows(open_reader(path)?)?)
                }
                (None, true) => HistogramSource::Synthetic {
                    samples: args.samples,
                },
                _ => {
                    return Err(CliError::Invalid(
                        "pass exactly one of --data FILE or --synthetic".into(),
                    ))
                }
            };
            let table = run_experiment(&ExperimentSpec::Compress(CompressParams {
                source,
                bins: args.bins,
                bin_width: args.bin_width,
                rows: args.rows,
                k: args.k,
                gamma: args.gamma_lasso,
                trials: args.trials,
                tests: args.tests,
                iters: args.iters,
                restarts: args.restarts,
                seed: args.seed,
                timing: args.timing,
            }))?;
            write_table(&args.out, &table)
        }
        Command::Prototypes(args) => {
            let source = match (&args.data, args.synthetic) {
                (Some(points_path), false) => {
                    let labels_path = args.labels.as_ref().ok_or_else(|| {
                        CliError::Invalid("--data requires --labels".into())
                    })?;
                    PointSource::Labeled {
                        points: data::parse_points_csv(open_reader(points_path)?)?,
                        labels: data::parse_labels_csv(open_reader(labels_path)?)?,
                    }
                }
                (None, true) => PointSource::SyntheticBlobs {
                    per_class: args.per_class,
                    spread: args.spread,
                },
                _ => {
                    return Err(CliError::Invalid(
                        "pass exactly one of --data FILE or --synthetic".into(),
                    ))
                }
            };
            let table = run_experiment(&ExperimentSpec::Prototypes(PrototypeParams {
                source,
                k: args.k,
                gamma: args.gamma,
                train_fraction: args.train_fraction,
                iters: args.iters,
                restarts: args.restarts,
                seed: args.seed,
                timing: args.timing,
            }))?;
            write_table(&args.out, &table)
        }
        Command::Sspcheck(args) => run_sspcheck(args, &mut std::io::stdout()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::FAILURE
        }
    }
}
