//! The `verify` subcommand.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use glasso_core::bounds::{
    compare_estimators, verify_chi2_tail, verify_maximal_moment, verify_nongaussian, verify_oracle,
    verify_pattern_recovery, CompareOptions, CoverageReport, HarnessOptions, MomentDist, Penalty,
};
use glasso_core::io;
use glasso_core::simulate::{DesignKind, NoiseKind, Pattern, SimSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::{emit, Failure, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    /// Oracle inequalities under Gaussian noise.
    Oracle,
    /// Lasso lower bounds on the orthogonal multi-task design.
    LassoLb,
    /// Group Lasso against the Lasso.
    Compare,
    /// Maximal moment inequality.
    Moment,
    /// Chi-square tail bound.
    Chi2,
    /// Oracle inequalities under fourth-moment noise.
    Nongauss,
    /// Sparsity pattern recovery by thresholding.
    Pattern,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    experiment: Experiment,
    /// Monte Carlo trials (repetitions for `moment` and `chi2`).
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Experiment settings as JSON; omitted fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report path; per-trial records go to the same path with extension
    /// `.trials.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn orthonormal(n: usize, tasks: usize, vars: usize, noise: NoiseKind, amplitude: f64, seed: u64) -> SimSpec {
    SimSpec {
        n,
        tasks,
        vars,
        s: 2,
        design: DesignKind::OrthonormalTasks,
        noise,
        amplitude,
        pattern: Pattern::DenseInGroup,
        seed,
    }
}

const UNIT_GAUSSIAN: NoiseKind = NoiseKind::Gaussian { sigma: 1.0 };

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OracleConfig {
    sim: Option<SimSpec>,
    #[serde(default = "default_penalty")]
    penalty: Penalty,
    #[serde(default)]
    options: HarnessOptions,
}

fn default_penalty() -> Penalty {
    Penalty::Multitask { a: 10.0 }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternConfig {
    sim: Option<SimSpec>,
    #[serde(default = "default_a")]
    a: f64,
    #[serde(default)]
    options: HarnessOptions,
}

fn default_a() -> f64 {
    10.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompareConfig {
    sim: Option<SimSpec>,
    #[serde(default = "default_compare")]
    compare: CompareOptions,
    #[serde(default)]
    options: HarnessOptions,
}

fn default_compare() -> CompareOptions {
    CompareOptions {
        a_group: 3.0,
        a_lasso: 3.0,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NongaussConfig {
    sim: Option<SimSpec>,
    #[serde(default = "default_delta")]
    delta: f64,
    #[serde(default)]
    options: HarnessOptions,
}

fn default_delta() -> f64 {
    0.5
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct MomentConfig {
    m: u32,
    big_m: usize,
    n: usize,
    dist: MomentDist,
}

impl Default for MomentConfig {
    fn default() -> Self {
        Self {
            m: 2,
            big_m: 10,
            n: 50,
            dist: MomentDist::Gaussian,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Chi2Config {
    v: Vec<f64>,
    x_grid: Vec<f64>,
}

impl Default for Chi2Config {
    fn default() -> Self {
        Self {
            v: vec![1.0; 100],
            x_grid: vec![0.5, 1.0, 2.0, 3.0],
        }
    }
}

fn read_config<T: DeserializeOwned>(path: Option<&Path>, empty: &str) -> Result<T, Failure> {
    match path {
        Some(p) => Ok(io::read_json(p)?),
        None => serde_json::from_str(empty).map_err(|e| Failure::Usage(e.to_string())),
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, Failure> {
    serde_json::to_value(v).map_err(|e| Failure::Usage(e.to_string()))
}

fn records_path(out: &Path) -> PathBuf {
    out.with_extension("trials.csv")
}

/// Writes the report (and trial records next to it) and turns a failed
/// check into exit code 3.
fn finish(args: &VerifyArgs, config: Value, passed: bool, report: Value, coverage: Option<&CoverageReport>) -> Outcome {
    let doc = json!({
        "experiment": args.experiment,
        "config": config,
        "passed": passed,
        "report": report,
    });
    emit(args.out.as_deref(), &doc)?;
    if let (Some(out), Some(c)) = (&args.out, coverage) {
        c.write_records_csv(&records_path(out))?;
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Violation(format!("{:?} experiment failed its checks", args.experiment).to_lowercase()))
    }
}

fn coverage_config(sim: &SimSpec, trials: usize, seed: u64, extra: Value) -> Value {
    let mut v = json!({"sim": sim, "trials": trials, "seed": seed});
    if let (Value::Object(a), Value::Object(b)) = (&mut v, extra) {
        a.extend(b);
    }
    v
}

pub fn run(args: &VerifyArgs) -> Outcome {
    let cfg = args.config.as_deref();
    let seed = args.seed;
    let trials = args.trials.unwrap_or(match args.experiment {
        Experiment::Moment => 100_000,
        Experiment::Chi2 => 1_000_000,
        _ => 200,
    });
    match args.experiment {
        Experiment::Oracle => {
            let c: OracleConfig = read_config(cfg, "{}")?;
            let sim = c.sim.unwrap_or_else(|| orthonormal(64, 8, 16, UNIT_GAUSSIAN, 1.0, seed));
            let r = verify_oracle(&sim, c.penalty, trials, seed, &c.options)?;
            let config = coverage_config(&sim, trials, seed, json!({"penalty": c.penalty, "options": c.options}));
            finish(args, config, r.passed, to_value(&r)?, Some(&r))
        }
        Experiment::Pattern => {
            let c: PatternConfig = read_config(cfg, "{}")?;
            let sim = c.sim.unwrap_or_else(|| orthonormal(64, 8, 16, UNIT_GAUSSIAN, 22.5, seed));
            let r = verify_pattern_recovery(&sim, c.a, trials, seed, &c.options)?;
            let config = coverage_config(&sim, trials, seed, json!({"a": c.a, "options": c.options}));
            finish(args, config, r.passed, to_value(&r)?, Some(&r))
        }
        Experiment::Compare | Experiment::LassoLb => {
            let c: CompareConfig = read_config(cfg, "{}")?;
            let sim = c.sim.unwrap_or_else(|| orthonormal(64, 32, 64, UNIT_GAUSSIAN, 3.2, seed));
            let r = compare_estimators(&sim, c.compare, trials, seed, &c.options)?;
            // The lower bounds alone decide `lasso-lb`; `compare` also
            // requires the Group Lasso to win on average.
            let passed = if args.experiment == Experiment::LassoLb {
                r.bounds.iter().all(|b| b.passed)
            } else {
                r.passed
            };
            let config = coverage_config(&sim, trials, seed, json!({"compare": c.compare, "options": c.options}));
            finish(args, config, passed, to_value(&r)?, Some(&r))
        }
        Experiment::Nongauss => {
            let c: NongaussConfig = read_config(cfg, "{}")?;
            let sim = c
                .sim
                .unwrap_or_else(|| orthonormal(64, 64, 16, NoiseKind::Rademacher { scale: 1.0 }, 1.0, seed));
            let r = verify_nongaussian(&sim, c.delta, trials, seed, &c.options)?;
            for note in r.notes.iter().filter(|n| n.starts_with("warning:")) {
                eprintln!("{}", json!({"warning": "vacuous_probability", "message": note}));
            }
            let config = coverage_config(&sim, trials, seed, json!({"delta": c.delta, "options": c.options}));
            finish(args, config, r.passed, to_value(&r)?, Some(&r))
        }
        Experiment::Moment => {
            let c: MomentConfig = read_config(cfg, "{}")?;
            let r = verify_maximal_moment(c.m, c.big_m, c.n, c.dist, trials, seed)?;
            let config = json!({"m": c.m, "big_m": c.big_m, "n": c.n, "dist": c.dist, "trials": trials, "seed": seed});
            finish(args, config, r.holds, to_value(&r)?, None)
        }
        Experiment::Chi2 => {
            let c: Chi2Config = read_config(cfg, "{}")?;
            let r = verify_chi2_tail(&c.v, &c.x_grid, trials, seed)?;
            let config = json!({"v": c.v, "x_grid": c.x_grid, "trials": trials, "seed": seed});
            finish(args, config, r.holds, to_value(&r)?, None)
        }
    }
}
