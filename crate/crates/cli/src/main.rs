use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ckmo::coreset::{build_coreset, CoresetConfig};
use ckmo::fair::{
    brute_force_fair, build_fair_coreset, fairness_violations, solve_fair_ckmo,
    DEFAULT_COLUMN_LIMIT,
};
use ckmo::io::{
    read_instance, read_points_csv, to_canonical_json, CoresetFile, InstanceFile, LoadedInstance,
    SolutionFile,
};
use ckmo::model::solution_violations;
use ckmo::solver::{brute_force_ckmo, solve_ckmo, CkmSolverConfig, SolveConfig};
use ckmo::verify::generate::{generate_instance, random_fairness, CapacityMode, GeneratorParams};
use ckmo::verify::{self as experiments, ExperimentReport, ORACLE_SUBSET_LIMIT};
use ckmo::{Error, Result};

#[derive(Parser)]
#[command(name = "ckmo", version, about = "Capacitated k-median with outliers")]
struct Cli {
    /// Worker threads (defaults to all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and write a solution with its run report.
    Solve(SolveArgs),
    /// Build a coreset of an instance's clients.
    Coreset(CoresetArgs),
    /// Check a solution file against its instance.
    Verify(VerifyArgs),
    /// Exact optimum by exhaustive search over facility sets.
    Oracle(OracleArgs),
    /// Run a seeded validation experiment.
    #[command(alias = "experiment")]
    Bench(BenchArgs),
    /// Write a random instance.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Instance JSON, or a point CSV (by `.csv` extension).
    #[arg(long, short)]
    input: PathBuf,
    /// Override (or, for CSV input, set) the number of facilities to open.
    #[arg(long)]
    k: Option<usize>,
    /// Override (or, for CSV input, set) the outlier budget.
    #[arg(long)]
    m: Option<u64>,
    /// Distance power for CSV input.
    #[arg(long)]
    z: Option<f64>,
}

#[derive(Args)]
struct OutArgs {
    /// Output file; stdout when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CoresetFlags {
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Force the per-ring sample size.
    #[arg(long)]
    sample_size: Option<usize>,
    /// Upper clamp on the per-ring sample size.
    #[arg(long)]
    max_sample_size: Option<usize>,
}

impl CoresetFlags {
    fn config(&self) -> CoresetConfig {
        CoresetConfig {
            s_override: self.sample_size,
            s_max: self.max_sample_size,
            ..CoresetConfig::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Plugin {
    Exact,
    LocalSearch,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    coreset: CoresetFlags,
    #[arg(long, value_enum, default_value = "exact")]
    plugin: Plugin,
    /// Fail if a coreset yields more outlier guesses than this.
    #[arg(long)]
    max_guesses: Option<u64>,
    /// Most facility sets the exact plug-in may enumerate.
    #[arg(long)]
    exact_subset_limit: Option<u128>,
    /// Seconds after which the best solution so far is returned.
    #[arg(long)]
    timeout: Option<f64>,
    /// Extra attempts with derived seeds.
    #[arg(long, default_value_t = 0)]
    retries: u32,
    /// Enforce the instance's group fairness constraints.
    #[arg(long)]
    fair: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct CoresetArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    coreset: CoresetFlags,
    /// Sample each ring separately per group.
    #[arg(long)]
    fair: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Solution JSON to check.
    #[arg(long, short)]
    solution: PathBuf,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    fair: bool,
    /// Most facility sets to enumerate.
    #[arg(long, default_value_t = ORACLE_SUBSET_LIMIT)]
    subset_limit: u128,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Experiment {
    /// Flow solver against exhaustive flow enumeration.
    Mcf,
    /// Flow with outliers against brute force, and monotone in m.
    Mcfo,
    /// Max-over-F coreset error per trial.
    CoresetError,
    /// Mean coreset error across sample sizes.
    CoresetTrend,
    /// Lipschitz slack of the ring probe.
    Lipschitz,
    /// Cost over optimum of the full pipeline.
    Ratio,
    /// Pipeline against brute force without sampling.
    Exactness,
    /// Fair assignment against exhaustive enumeration.
    Wfao,
}

#[derive(Args)]
struct GeneratorArgs {
    #[arg(long, default_value_t = 60)]
    n: usize,
    #[arg(long, default_value_t = 8)]
    facilities: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    m: u64,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Random capacities instead of uniform ones.
    #[arg(long)]
    heterogeneous: bool,
}

impl GeneratorArgs {
    fn params(&self) -> GeneratorParams {
        let mut p = GeneratorParams::new(self.n, self.facilities, self.k, self.m);
        p.dim = self.dim;
        if self.heterogeneous {
            p.capacity = CapacityMode::Heterogeneous;
        }
        p
    }
}

#[derive(Args)]
struct BenchArgs {
    #[arg(value_enum)]
    experiment: Experiment,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[command(flatten)]
    generator: GeneratorArgs,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    /// Per-ring sample size for the coreset and ratio experiments.
    #[arg(long)]
    sample_size: Option<usize>,
    /// Sample sizes for the trend experiment.
    #[arg(long, value_delimiter = ',', default_values_t = [4usize, 8, 16, 32])]
    sizes: Vec<usize>,
    /// Fraction of trials that must meet the threshold.
    #[arg(long, default_value_t = 0.9)]
    required_fraction: f64,
    /// Also write per-trial measurements as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    generator: GeneratorArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Split the clients into this many groups with random fairness bounds.
    #[arg(long)]
    groups: Option<usize>,
    #[command(flatten)]
    out: OutArgs,
}

fn load(args: &InputArgs) -> Result<LoadedInstance> {
    let path = &args.input;
    let file = File::open(path).map_err(|e| io_context(path, e))?;
    let reader = BufReader::new(file);
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let context = |e: Error| match e {
        Error::Json(j) => Error::Parse(format!("{}: {j}", path.display())),
        Error::Csv(c) => Error::Parse(format!("{}: {c}", path.display())),
        Error::Parse(p) => Error::Parse(format!("{}: {p}", path.display())),
        other => other,
    };
    let mut loaded = if is_csv {
        let (Some(k), Some(m)) = (args.k, args.m) else {
            return Err(Error::InvalidArgument(
                "CSV input needs --k and --m".to_string(),
            ));
        };
        let instance = read_points_csv(reader, k, m, args.z.unwrap_or(1.0)).map_err(context)?;
        LoadedInstance {
            instance,
            fairness: None,
        }
    } else {
        read_instance(reader).map_err(context)?
    };
    if let Some(k) = args.k {
        loaded.instance.k = k;
    }
    if let Some(m) = args.m {
        loaded.instance.m = m;
    }
    if let Some(z) = args.z {
        loaded.instance.z = z;
    }
    loaded.instance.validate()?;
    if let Some(spec) = &loaded.fairness {
        spec.validate(&loaded.instance)?;
    }
    Ok(loaded)
}

fn io_context(path: &Path, e: io::Error) -> Error {
    Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn emit(out: &OutArgs, text: &str) -> Result<()> {
    match &out.out {
        Some(path) => std::fs::write(path, text).map_err(|e| io_context(path, e)),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn fairness_of(loaded: &LoadedInstance) -> Result<&ckmo::fair::FairnessSpec> {
    loaded.fairness.as_ref().ok_or_else(|| {
        Error::InvalidArgument("--fair needs \"groups\" in the instance".to_string())
    })
}

fn solve(args: &SolveArgs) -> Result<()> {
    let loaded = load(&args.input)?;
    let instance = &loaded.instance;
    let mut ckm = match args.plugin {
        Plugin::Exact => CkmSolverConfig::default(),
        Plugin::LocalSearch => CkmSolverConfig::local_search(),
    };
    if let Some(limit) = args.exact_subset_limit {
        ckm.exact_subset_limit = limit;
    }
    let timeout = match args.timeout {
        Some(t) if !(t.is_finite() && t >= 0.0) => {
            return Err(Error::InvalidArgument(format!("invalid timeout {t}")))
        }
        t => t.map(Duration::from_secs_f64),
    };
    let config = SolveConfig {
        coreset: args.coreset.config(),
        ckm,
        max_guesses: args.max_guesses,
        timeout,
        retries: args.retries,
        ..SolveConfig::default()
    };
    let outcome = if args.fair {
        let spec = fairness_of(&loaded)?;
        solve_fair_ckmo(
            instance,
            spec,
            args.coreset.epsilon,
            &config,
            args.coreset.seed,
            DEFAULT_COLUMN_LIMIT,
        )?
    } else {
        solve_ckmo(instance, args.coreset.epsilon, &config, args.coreset.seed)?
    };
    let report = serde_json::to_value(&outcome.report)?;
    let file = SolutionFile::new(
        instance,
        &outcome.solution,
        outcome.report.partial,
        Some(report),
    );
    if outcome.report.partial {
        eprintln!("warning: timed out; returning the best solution found so far");
    }
    emit(&args.out, &to_canonical_json(&file)?)
}

fn coreset(args: &CoresetArgs) -> Result<()> {
    let loaded = load(&args.input)?;
    let instance = &loaded.instance;
    let config = args.coreset.config();
    let coreset = if args.fair {
        build_fair_coreset(
            instance,
            fairness_of(&loaded)?,
            args.coreset.epsilon,
            &config,
            args.coreset.seed,
        )?
    } else {
        build_coreset(instance, args.coreset.epsilon, &config, args.coreset.seed)?
    };
    emit(
        &args.out,
        &to_canonical_json(&CoresetFile::new(instance, &coreset))?,
    )
}

/// Returns whether the solution is valid.
fn verify(args: &VerifyArgs) -> Result<bool> {
    let loaded = load(&args.input)?;
    let instance = &loaded.instance;
    let path = &args.solution;
    let file: SolutionFile = serde_json::from_reader(BufReader::new(
        File::open(path).map_err(|e| io_context(path, e))?,
    ))
    .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let (violations, recomputed) = match file.to_solution(instance) {
        Ok(solution) => {
            let mut v =
                solution_violations(instance, &instance.unit_weights(), instance.m, &solution);
            if let Some(spec) = &loaded.fairness {
                v.extend(fairness_violations(spec, &solution));
            }
            let cost = ckmo::model::assignment_cost(instance, &solution.assignment)
                + instance.opening_cost_of(&solution.open);
            (v, Some(cost))
        }
        Err(Error::InvalidSolution(v)) => (v, None),
        Err(e) => return Err(e),
    };
    for v in &violations {
        eprintln!("violation: {v}");
    }
    let report = json!({
        "valid": violations.is_empty(),
        "reported_cost": file.cost,
        "recomputed_cost": recomputed,
        "fairness_checked": loaded.fairness.is_some(),
        "violations": violations.iter().map(ToString::to_string).collect::<Vec<_>>(),
    });
    emit(&args.out, &to_canonical_json(&report)?)?;
    Ok(violations.is_empty())
}

fn oracle(args: &OracleArgs) -> Result<()> {
    let loaded = load(&args.input)?;
    let instance = &loaded.instance;
    let solution = if args.fair {
        brute_force_fair(
            instance,
            fairness_of(&loaded)?,
            args.subset_limit,
            DEFAULT_COLUMN_LIMIT,
        )?
    } else {
        brute_force_ckmo(instance, args.subset_limit)?
    };
    emit(
        &args.out,
        &to_canonical_json(&SolutionFile::new(instance, &solution, false, None))?,
    )
}

fn bench(args: &BenchArgs) -> Result<bool> {
    let params = args.generator.params();
    let (seed, trials, eps) = (args.seed, args.trials, args.epsilon);
    let report: ExperimentReport = match args.experiment {
        Experiment::Mcf => experiments::mcf_oracle_sweep(trials, 8, 12, 3, seed),
        Experiment::Mcfo => experiments::mcfo_consistency_check(trials, seed),
        Experiment::CoresetError => experiments::coreset_error_experiment(
            &params,
            eps,
            args.sample_size,
            trials,
            args.required_fraction,
            seed,
        )?,
        Experiment::CoresetTrend => {
            experiments::coreset_error_trend(&params, eps, &args.sizes, trials, 1, seed)?
        }
        Experiment::Lipschitz => experiments::lipschitz_experiment(&params, trials, 100, 3, seed)?,
        Experiment::Ratio => experiments::ratio_experiment(
            &params,
            eps,
            args.sample_size,
            trials,
            args.required_fraction,
            seed,
        )?,
        Experiment::Exactness => experiments::exactness_experiment(trials, seed)?,
        Experiment::Wfao => experiments::wfao_experiment(trials, seed)?,
    };
    if let Some(path) = &args.csv {
        report.write_csv(File::create(path).map_err(|e| io_context(path, e))?)?;
    }
    emit(&args.out, &to_canonical_json(&report)?)?;
    Ok(report.passed)
}

fn generate(args: &GenerateArgs) -> Result<()> {
    let instance = generate_instance(&args.generator.params(), args.seed);
    let spec = match args.groups {
        Some(0) => {
            return Err(Error::InvalidArgument(
                "--groups must be at least 1".to_string(),
            ))
        }
        Some(l) => {
            let mut rng = ckmo::rng::substream(args.seed, &[ckmo::rng::tag::GENERATOR, 2]);
            Some(random_fairness(&instance, l, &mut rng))
        }
        None => None,
    };
    emit(
        &args.out,
        &to_canonical_json(&InstanceFile::from_instance(&instance, spec.as_ref()))?,
    )
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Infeasible(_) => 2,
        Error::InvalidInstance(_)
        | Error::InvalidSolution(_)
        | Error::InvalidArgument(_)
        | Error::Parse(_)
        | Error::Json(_)
        | Error::Csv(_) => 3,
        Error::LimitExceeded(_) => 4,
        Error::InvalidNetwork(_) | Error::Io(_) => 1,
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("--threads: {e}")))?;
    }
    let ok = |()| ExitCode::SUCCESS;
    match &cli.command {
        Command::Solve(a) => solve(a).map(ok),
        Command::Coreset(a) => coreset(a).map(ok),
        Command::Verify(a) => verify(a).map(|valid| {
            if valid {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }),
        Command::Oracle(a) => oracle(a).map(ok),
        Command::Bench(a) => bench(a).map(|passed| {
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }),
        Command::Generate(a) => generate(a).map(ok),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
