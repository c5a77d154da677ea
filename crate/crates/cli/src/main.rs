//! `glasso`: solve, tune, diagnose, simulate, recover and verify from the
//! command line.
//!
//! Exit codes: 0 success, 1 invalid input or usage, 2 numerical failure,
//! 3 a verify experiment detected a violated bound. Errors are written to
//! stderr as one JSON object per line.

mod verify;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use glasso_core::io::{self, ProblemManifest, TaskFiles};
use glasso_core::simulate::{simulate_dataset, SimSpec};
use glasso_core::{
    assemble_multitask, coherence_alpha, diagnose, estimate_support, gram_summary, lambda_groups,
    lambda_multitask, lambda_nongaussian, multitask_gram_summary, solve_group_lasso, x_star, DiagnoseOptions,
    Error, GramSummary, GroupPartition, Problem, RegressionData, SolveOptions,
};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(name = "glasso", version, about = "Group Lasso estimation and bound verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit the Group Lasso on a problem manifest.
    Solve(SolveArgs),
    /// Compute theory-driven penalty levels.
    Tune(TuneArgs),
    /// Gram diagnostics: coherence, RE constants, restricted eigenvalues.
    Diagnose(DiagnoseArgs),
    /// Write a seeded synthetic multi-task dataset.
    Simulate(SimulateArgs),
    /// Fit and threshold group norms to estimate the sparsity pattern.
    Recover(RecoverArgs),
    /// Run a Monte Carlo verification experiment.
    Verify(verify::VerifyArgs),
}

#[derive(Debug, Args)]
struct Data {
    /// Problem manifest `{"design", "response", "groups", "lambda"?}`.
    #[arg(long, conflicts_with = "tasks")]
    problem: Option<PathBuf>,
    /// Multi-task manifest `{"tasks": [{"design", "response"}, ...]}`.
    #[arg(long)]
    tasks: Option<PathBuf>,
    /// Common penalty level for every group, overriding the manifest.
    #[arg(long)]
    lambda: Option<f64>,
}

#[derive(Debug, Args)]
struct Fit {
    /// KKT tolerance; the default is `1e-8 max(1, λ_max)`.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 50_000)]
    max_iter: usize,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    data: Data,
    #[command(flatten)]
    fit: Fit,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum RegimeArg {
    /// Per-group levels from the Gram blocks of a problem.
    Gaussian,
    /// Common multi-task level.
    Multitask,
    /// Multi-task level under bounded fourth moments.
    FourthMoment,
}

#[derive(Debug, Args)]
struct TuneArgs {
    #[arg(long, value_enum)]
    regime: RegimeArg,
    /// Problem manifest (gaussian regime) or multi-task manifest (other
    /// regimes, supplies n, T, M and x_*).
    #[arg(long)]
    problem: Option<PathBuf>,
    #[arg(long)]
    tasks: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    #[arg(long = "a", default_value_t = 10.0)]
    a: f64,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    /// `b` with `E W⁴ ≤ b⁴`.
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    #[arg(long)]
    x_star: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "num-tasks")]
    num_tasks: Option<usize>,
    #[arg(long)]
    vars: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DiagnoseArgs {
    #[command(flatten)]
    data: Data,
    #[arg(long, default_value_t = 1)]
    s: usize,
    #[arg(long, default_value_t = 3.0)]
    cone_factor: f64,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Simulation spec as JSON.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RecoverArgs {
    #[command(flatten)]
    data: Data,
    #[command(flatten)]
    fit: Fit,
    /// Sparsity used for the coherence margin.
    #[arg(long, default_value_t = 1)]
    s: usize,
    /// Coherence margin; computed from the Gram matrix when omitted.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Everything that can end a run with a non-zero exit code.
#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Usage(String),
    /// A verify experiment ran to completion and found a failed check.
    Violation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Core(e) if e.is_numerical() => 2,
            Failure::Core(_) | Failure::Usage(_) => 1,
            Failure::Violation(_) => 3,
        }
    }

    fn json(&self) -> Value {
        let (kind, message) = match self {
            Failure::Core(e) => (e.kind(), e.to_string()),
            Failure::Usage(m) => ("usage", m.clone()),
            Failure::Violation(m) => ("verification_failed", m.clone()),
        };
        json!({"error": kind, "message": message})
    }
}

pub type Outcome = std::result::Result<(), Failure>;

/// Writes `value` as pretty JSON to `out`, or to stdout without one.
pub fn emit<T: Serialize>(out: Option<&Path>, value: &T) -> Outcome {
    match out {
        Some(path) => io::write_json(path, value)?,
        None => {
            let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(e.to_string()))?;
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{text}") {
                Ok(()) => {}
                // A closed pipe (e.g. `| head`) is not an error of the run.
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                Err(e) => {
                    return Err(Error::Io {
                        path: "<stdout>".into(),
                        source: e,
                    }
                    .into())
                }
            }
        }
    }
    Ok(())
}

struct Loaded {
    data: RegressionData,
    gram: GramSummary,
    lambda: Vec<f64>,
    tasks: Option<usize>,
    x_star: Option<f64>,
}

fn load(args: &Data) -> Result<Loaded, Failure> {
    let (data, gram, manifest_lambda, tasks, xs) = match (&args.problem, &args.tasks) {
        (Some(p), None) => {
            let (data, lambda) = io::load_problem(p)?;
            let gram = gram_summary(&data.x, &data.partition)?;
            (data, gram, lambda, None, None)
        }
        (None, Some(t)) => {
            let spec = io::load_multitask(t)?;
            let gram = multitask_gram_summary(&spec);
            (assemble_multitask(&spec), gram, None, Some(spec.tasks()), Some(x_star(&spec)))
        }
        _ => return Err(Failure::Usage("exactly one of --problem and --tasks is required".into())),
    };
    let groups = data.partition.len();
    let lambda = match (args.lambda, manifest_lambda) {
        (Some(l), _) => vec![l; groups],
        (None, Some(l)) => l,
        (None, None) => return Err(Failure::Usage("no penalty: pass --lambda or add \"lambda\" to the manifest".into())),
    };
    Ok(Loaded {
        data,
        gram,
        lambda,
        tasks,
        x_star: xs,
    })
}

fn solve_options(fit: &Fit) -> SolveOptions {
    SolveOptions {
        max_iter: fit.max_iter,
        tol: fit.tol,
        accelerate: true,
    }
}

fn data_config(d: &Data) -> Value {
    json!({"problem": d.problem, "tasks": d.tasks, "lambda": d.lambda})
}

fn run_solve(args: &SolveArgs) -> Outcome {
    let loaded = load(&args.data)?;
    let problem = Problem::new(loaded.data, loaded.lambda)?;
    let opts = solve_options(&args.fit);
    let result = solve_group_lasso(&problem, &opts)?;
    let report = json!({
        "config": {
            "data": data_config(&args.data),
            "lambda": problem.lambda,
            "tol": opts.tolerance(problem.lambda_max()),
            "max_iter": opts.max_iter,
        },
        "result": result,
    });
    emit(args.out.as_deref(), &report)?;
    if !result.converged {
        return Err(Error::NotConverged {
            iterations: result.iterations,
            residual: result.kkt_residual,
        }
        .into());
    }
    Ok(())
}

fn run_tune(args: &TuneArgs) -> Outcome {
    let config = json!({
        "regime": args.regime, "problem": args.problem, "tasks": args.tasks, "sigma": args.sigma,
        "q": args.q, "a": args.a, "delta": args.delta, "b": args.b, "x_star": args.x_star,
        "n": args.n, "num_tasks": args.num_tasks, "vars": args.vars,
    });
    let from_tasks = match &args.tasks {
        Some(t) => Some(io::load_multitask(t)?),
        None => None,
    };
    let need = |flag: Option<usize>, from: Option<usize>, name: &str| {
        flag.or(from).ok_or_else(|| Failure::Usage(format!("--{name} or --tasks is required")))
    };
    let result = match args.regime {
        RegimeArg::Gaussian => {
            let path = args
                .problem
                .as_ref()
                .ok_or_else(|| Failure::Usage("the gaussian regime needs --problem".into()))?;
            let (data, _) = io::load_problem(path)?;
            let gram = gram_summary(&data.x, &data.partition)?;
            let t = lambda_groups(args.sigma, data.n_obs(), args.q, &gram, &data.partition.sizes())?;
            serde_json::to_value(t).map_err(|e| Failure::Usage(e.to_string()))?
        }
        RegimeArg::Multitask => {
            let n = need(args.n, from_tasks.as_ref().map(|s| s.samples()), "n")?;
            let t = need(args.num_tasks, from_tasks.as_ref().map(|s| s.tasks()), "num-tasks")?;
            let m = need(args.vars, from_tasks.as_ref().map(|s| s.vars()), "vars")?;
            let (lambda, probability) = lambda_multitask(args.sigma, n, t, m, args.a)?;
            json!({"lambda": vec![lambda; m], "probability": probability, "regime": "multitask"})
        }
        RegimeArg::FourthMoment => {
            let n = need(args.n, from_tasks.as_ref().map(|s| s.samples()), "n")?;
            let t = need(args.num_tasks, from_tasks.as_ref().map(|s| s.tasks()), "num-tasks")?;
            let m = need(args.vars, from_tasks.as_ref().map(|s| s.vars()), "vars")?;
            let xs = args
                .x_star
                .or(from_tasks.as_ref().map(x_star))
                .ok_or_else(|| Failure::Usage("--x-star or --tasks is required".into()))?;
            let tuning = lambda_nongaussian(xs, args.b, n, t, m, args.delta)?;
            if tuning.vacuous {
                eprintln!(
                    "{}",
                    json!({"warning": "vacuous_probability", "message": format!("guaranteed probability {} is not positive", tuning.probability)})
                );
            }
            let mut v = serde_json::to_value(&tuning).map_err(|e| Failure::Usage(e.to_string()))?;
            v["x_star"] = json!(xs);
            v
        }
    };
    emit(args.out.as_deref(), &json!({"config": config, "result": result}))
}

fn run_diagnose(args: &DiagnoseArgs) -> Outcome {
    let loaded = load(&args.data)?;
    let opts = DiagnoseOptions {
        s: args.s,
        cone_factor: args.cone_factor,
        samples: args.samples,
        seed: args.seed,
    };
    let report = diagnose(&loaded.gram, &loaded.data.partition, &loaded.lambda, &opts, loaded.tasks, loaded.x_star)?;
    emit(
        args.out.as_deref(),
        &json!({"config": {"data": data_config(&args.data), "lambda": loaded.lambda, "options": opts}, "result": report}),
    )
}

fn run_simulate(args: &SimulateArgs) -> Outcome {
    let mut spec: SimSpec = io::read_json(&args.config)?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let ds = simulate_dataset(&spec)?;
    let dir = &args.out;
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.display().to_string(),
        source: e,
    })?;
    let mut tasks = Vec::with_capacity(spec.tasks);
    for (t, (x, y)) in ds.tasks.designs().iter().zip(ds.tasks.responses()).enumerate() {
        let (xf, yf) = (format!("x_{t}.csv"), format!("y_{t}.csv"));
        io::write_matrix(&dir.join(&xf), x)?;
        io::write_vector(&dir.join(&yf), y)?;
        tasks.push(TaskFiles {
            design: xf.into(),
            response: yf.into(),
        });
    }
    io::write_json(&dir.join("tasks.json"), &json!({"tasks": tasks}))?;
    io::write_matrix(&dir.join("design.csv"), &ds.data.x)?;
    io::write_vector(&dir.join("response.csv"), &ds.data.y)?;
    io::write_json(
        &dir.join("problem.json"),
        &ProblemManifest {
            design: "design.csv".into(),
            response: "response.csv".into(),
            groups: Some(ds.data.partition.groups().to_vec()),
            lambda: None,
        },
    )?;
    io::write_vector(&dir.join("beta_star.csv"), &nalgebra_vector(&ds.beta_star))?;
    io::write_json(&dir.join("metadata.json"), &ds.metadata)?;
    Ok(())
}

fn nalgebra_vector(v: &[f64]) -> glasso_core::nalgebra::DVector<f64> {
    glasso_core::nalgebra::DVector::from_column_slice(v)
}

fn run_recover(args: &RecoverArgs) -> Outcome {
    let loaded = load(&args.data)?;
    let part: GroupPartition = loaded.data.partition.clone();
    let phi = loaded.gram.phi.ok_or(Error::NonConstantDiagonal {
        min: loaded.gram.diag_min,
        max: loaded.gram.diag_max,
    })?;
    let alpha = match args.alpha {
        Some(a) => a,
        None => coherence_alpha(&loaded.gram, &part, &loaded.lambda, args.s)?,
    };
    let problem = Problem::new(loaded.data, loaded.lambda)?;
    let opts = solve_options(&args.fit);
    let fit = solve_group_lasso(&problem, &opts)?;
    if !fit.converged {
        return Err(Error::NotConverged {
            iterations: fit.iterations,
            residual: fit.kkt_residual,
        }
        .into());
    }
    let support = estimate_support(&fit.beta, &part, problem.lambda_max(), phi, alpha)?;
    let alpha_json = if alpha.is_infinite() { json!("inf") } else { json!(alpha) };
    emit(
        args.out.as_deref(),
        &json!({
            "config": {"data": data_config(&args.data), "lambda": problem.lambda, "s": args.s, "alpha": alpha_json,
                       "tol": opts.tolerance(problem.lambda_max()), "max_iter": opts.max_iter},
            "result": {"support": support, "phi": phi, "alpha": alpha_json, "fit": fit},
        }),
    )
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Tune(a) => run_tune(a),
        Command::Diagnose(a) => run_diagnose(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Recover(a) => run_recover(a),
        Command::Verify(a) => verify::run(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.to_string();
            let first = message.lines().next().unwrap_or_default().trim_start_matches("error: ");
            eprintln!("{}", Failure::Usage(first.to_string()).json());
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.json());
            ExitCode::from(f.code())
        }
    }
}
