//! Command-line entry point for the experiment runner.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use qsched::basis::BasisKind;
use qsched::engine::{IIConfig, TerminalStatus};
use qsched::error::{Error, Result};
use qsched::metrics::ScalingModel;
use qsched::problems::ProblemKind;
use qsched::Real;

use qsched_cli::config::ConfigFile;
use qsched_cli::{
    cmd_fit, cmd_generate, cmd_run, cmd_sweep, parse_int_list, ExperimentConfig, Method,
};

/// Exit code for a run that stopped on the evaluation budget.
const EXIT_BUDGET_EXHAUSTED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "qsched",
    version,
    about = "QAOA schedule optimization: iterative interpolation, Fourier and linear baselines"
)]
struct Cli {
    /// Directory all output files are written to.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// key=value config file; explicit flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one spectrum file per (n, seed).
    Generate {
        #[command(flatten)]
        problem: ProblemArgs,
    },
    /// One optimization run: writes a trace CSV and a schedule file.
    Run {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        engine: EngineArgs,
        /// ii, fourier or linear.
        #[arg(long)]
        method: Option<String>,
        /// Load the spectrum from an exported file instead of generating it.
        #[arg(long)]
        spectrum_file: Option<PathBuf>,
    },
    /// Run every (n, seed) cell and write the long-form results table.
    Sweep {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        engine: EngineArgs,
        /// ii, fourier or linear.
        #[arg(long)]
        method: Option<String>,
    },
    /// Fit scaling laws to the per-size median depths of a sweep table.
    Fit {
        /// Sweep results table (CSV).
        #[arg(long)]
        table: PathBuf,
        /// power, exp or both.
        #[arg(long)]
        model: Option<String>,
    },
}

#[derive(Args, Default)]
struct ProblemArgs {
    /// labs, sk or po.
    #[arg(long)]
    problem: Option<String>,

    /// Problem sizes: one value, a comma list, or an inclusive range (10..14).
    #[arg(long)]
    n: Option<String>,

    /// Instance seeds: one value, a comma list, or an inclusive range (0..19).
    #[arg(long)]
    seeds: Option<String>,

    /// Single instance seed (shorthand for --seeds with one entry).
    #[arg(long, conflicts_with = "seeds")]
    seed: Option<i64>,

    /// Portfolio cardinality K (default: half the assets, rounded up).
    #[arg(long)]
    k: Option<usize>,

    /// Portfolio risk trade-off q.
    #[arg(long)]
    q: Option<Real>,

    /// Qubit cap for dense spectra and statevectors.
    #[arg(long)]
    cap: Option<usize>,
}

#[derive(Args, Default)]
struct EngineArgs {
    /// Starting depth.
    #[arg(long)]
    p0: Option<usize>,

    /// Depth step between stages.
    #[arg(long)]
    delta_p: Option<usize>,

    /// Maximum depth (linear method runs at exactly this depth).
    #[arg(long)]
    p_max: Option<usize>,

    /// Relative-improvement threshold for the patience counter.
    #[arg(long)]
    epsilon: Option<Real>,

    /// Initial number of tuned coefficient pairs.
    #[arg(long)]
    c0: Option<usize>,

    /// Coefficient-count growth step.
    #[arg(long)]
    c_step: Option<usize>,

    /// Patience: consecutive stalled stages before the count grows.
    #[arg(long)]
    tau: Option<usize>,

    /// Stop when the stage approximation ratio reaches this value.
    #[arg(long)]
    ar_target: Option<Real>,

    /// Stop when the stage ground-state overlap reaches this value.
    #[arg(long)]
    overlap_target: Option<Real>,

    /// Total objective-evaluation budget.
    #[arg(long)]
    eval_budget: Option<u64>,

    /// chebyshev, legendre, fourier or linear.
    #[arg(long)]
    basis: Option<String>,

    /// Optimizer parameter tolerance.
    #[arg(long)]
    param_tol: Option<Real>,

    /// Optimizer objective tolerance.
    #[arg(long)]
    obj_tol: Option<Real>,

    /// Per-stage evaluation cap, per tuned parameter.
    #[arg(long)]
    stage_evals_per_param: Option<usize>,

    /// Initial simplex step.
    #[arg(long)]
    initial_step: Option<Real>,
}

/// CLI flag wins over the config-file entry of the same name.
fn pick<T: FromStr>(flag: Option<T>, file: &ConfigFile, key: &str) -> Result<Option<T>> {
    if flag.is_some() {
        return Ok(flag);
    }
    file.get(key)
}

fn build_engine(args: &EngineArgs, file: &ConfigFile) -> Result<IIConfig> {
    let mut cfg = IIConfig::default();
    cfg.p0 = pick(args.p0, file, "p0")?.unwrap_or(cfg.p0);
    cfg.delta_p = pick(args.delta_p, file, "delta-p")?.unwrap_or(cfg.delta_p);
    cfg.p_max = pick(args.p_max, file, "p-max")?.unwrap_or(cfg.p_max);
    cfg.epsilon = pick(args.epsilon, file, "epsilon")?.unwrap_or(cfg.epsilon);
    cfg.c0 = pick(args.c0, file, "c0")?.unwrap_or(cfg.c0);
    cfg.c_step = pick(args.c_step, file, "c-step")?.unwrap_or(cfg.c_step);
    cfg.tau = pick(args.tau, file, "tau")?.unwrap_or(cfg.tau);
    cfg.ar_target = pick(args.ar_target, file, "ar-target")?;
    cfg.overlap_target = pick(args.overlap_target, file, "overlap-target")?;
    cfg.eval_budget = pick(args.eval_budget, file, "eval-budget")?.unwrap_or(cfg.eval_budget);
    if let Some(token) = pick(args.basis.clone(), file, "basis")? {
        cfg.basis = BasisKind::from_str(&token)?;
    }
    cfg.optimizer.param_tol =
        pick(args.param_tol, file, "param-tol")?.unwrap_or(cfg.optimizer.param_tol);
    cfg.optimizer.obj_tol = pick(args.obj_tol, file, "obj-tol")?.unwrap_or(cfg.optimizer.obj_tol);
    cfg.optimizer.stage_evals_per_param = pick(
        args.stage_evals_per_param,
        file,
        "stage-evals-per-param",
    )?
    .unwrap_or(cfg.optimizer.stage_evals_per_param);
    cfg.optimizer.initial_step =
        pick(args.initial_step, file, "initial-step")?.unwrap_or(cfg.optimizer.initial_step);
    Ok(cfg)
}

struct Globals {
    out_dir: PathBuf,
    workers: usize,
    file: ConfigFile,
}

fn build_experiment(
    globals: &Globals,
    problem: &ProblemArgs,
    engine: Option<&EngineArgs>,
    method: Option<&str>,
) -> Result<ExperimentConfig> {
    let file = &globals.file;
    let problem_token = pick(problem.problem.clone(), file, "problem")?
        .ok_or_else(|| Error::InvalidInput("missing --problem (labs, sk or po)".into()))?;
    let kind = ProblemKind::from_str(&problem_token)?;
    let method_token = pick(method.map(str::to_string), file, "method")?;
    let method = match method_token {
        Some(token) => Method::from_str(&token)?,
        None => Method::Ii,
    };
    let mut cfg = ExperimentConfig::new(kind, method);
    cfg.out_dir = globals.out_dir.clone();
    cfg.workers = globals.workers;
    let sizes = pick(problem.n.clone(), file, "n")?
        .ok_or_else(|| Error::InvalidInput("missing --n".into()))?;
    cfg.sizes = parse_int_list(&sizes)?;
    if let Some(seed) = problem.seed {
        cfg.seeds = vec![seed];
    } else if let Some(seeds) = pick(problem.seeds.clone(), file, "seeds")? {
        cfg.seeds = parse_int_list(&seeds)?;
    }
    cfg.cardinality = pick(problem.k, file, "k")?;
    cfg.risk_tradeoff = pick(problem.q, file, "q")?.unwrap_or(cfg.risk_tradeoff);
    cfg.cap = pick(problem.cap, file, "cap")?.unwrap_or(cfg.cap);
    if let Some(engine_args) = engine {
        cfg.engine = build_engine(engine_args, file)?;
    } else {
        cfg.engine = build_engine(&EngineArgs::default(), file)?;
    }
    Ok(cfg)
}

fn parse_models(token: &str) -> Result<Vec<ScalingModel>> {
    match token {
        "both" => Ok(vec![ScalingModel::PowerLaw, ScalingModel::Exponential]),
        other => Ok(vec![ScalingModel::from_str(other)?]),
    }
}

fn dispatch(cli: Cli) -> Result<Option<TerminalStatus>> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let out_dir = match cli.out_dir {
        Some(dir) => dir,
        None => match file.get_string("out-dir") {
            Some(dir) => PathBuf::from(dir),
            None => PathBuf::from("."),
        },
    };
    let workers = match cli.workers {
        Some(w) => w,
        None => file
            .get::<usize>("workers")?
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
    };
    let globals = Globals {
        out_dir,
        workers,
        file,
    };

    match cli.command {
        Command::Generate { problem } => {
            let cfg = build_experiment(&globals, &problem, None, None)?;
            let paths = cmd_generate(&cfg)?;
            for path in paths {
                println!("{}", path.display());
            }
            Ok(None)
        }
        Command::Run {
            problem,
            engine,
            method,
            spectrum_file,
        } => {
            let cfg = build_experiment(&globals, &problem, Some(&engine), method.as_deref())?;
            let output = cmd_run(&cfg, spectrum_file.as_deref())?;
            let last = output.run.trace.final_record();
            println!(
                "status={} p={} ar={} overlap={} tnl={}",
                output.status,
                last.map_or(0, |r| r.p),
                last.map_or(Real::NAN, |r| r.ar),
                last.map_or(Real::NAN, |r| r.overlap),
                output.run.trace.tnl()
            );
            println!("{}", output.trace_path.display());
            println!("{}", output.schedule_path.display());
            Ok(Some(output.status))
        }
        Command::Sweep {
            problem,
            engine,
            method,
        } => {
            let cfg = build_experiment(&globals, &problem, Some(&engine), method.as_deref())?;
            let (rows, path) = cmd_sweep(&cfg)?;
            println!("{} rows -> {}", rows.len(), path.display());
            Ok(None)
        }
        Command::Fit { table, model } => {
            let token = match model {
                Some(token) => token,
                None => globals
                    .file
                    .get_string("model")
                    .unwrap_or("both")
                    .to_string(),
            };
            let models = parse_models(&token)?;
            let outputs = cmd_fit(&table, &models, &globals.out_dir)?;
            for out in outputs {
                println!(
                    "model={} a={} b={} r_squared={} -> {}",
                    out.report.model,
                    out.report.a,
                    out.report.b,
                    out.report.r_squared,
                    out.json_path.display()
                );
            }
            Ok(None)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(Some(TerminalStatus::BudgetExhausted)) => ExitCode::from(EXIT_BUDGET_EXHAUSTED),
        Ok(_) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
