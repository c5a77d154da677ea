//! Monte Carlo experiments on simulated multi-task data.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::rhs::{
    bias_rhs, lasso_level, lasso_lower_rhs, lasso_signal_threshold, multitask_rhs, nongaussian_rhs, oracle_rhs,
    MultiTaskInputs, NonGaussianInputs, OracleInputs, OracleRhs,
};
use super::{aggregate, summarize_events, BoundSpec, CoverageReport, Direction, KappaInfo, Quantiles, TrialRecord};
use crate::diagnostics::{coherence_alpha, re_from_coherence, re_sampled, x_star_of, COHERENCE_ZERO_RTOL};
use crate::error::{Error, Result};
use crate::model::GroupPartition;
use crate::recovery::{estimate_support, min_signal_ok, pnorm_radius, sup_threshold};
use crate::rng::trial_seed;
use crate::simulate::{Fixture, SimSpec};
use crate::solver::{solve_quadratic, SolveOptions, SolveResult};
use crate::tuning::{lambda_groups, lambda_multitask, lambda_nongaussian};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HarnessOptions {
    /// Solver KKT tolerance; `None` uses the solver default.
    pub tol: Option<f64>,
    pub max_iter: usize,
    /// Cone samples for the RE estimate when coherence does not certify one.
    pub cone_samples: usize,
}

impl Default for HarnessOptions {
    fn default() -> Self {
        Self {
            tol: None,
            max_iter: 50_000,
            cone_samples: 10_000,
        }
    }
}

impl HarnessOptions {
    fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            max_iter: self.max_iter,
            tol: self.tol,
            accelerate: true,
        }
    }
}

/// How the Group Lasso penalty is chosen under Gaussian noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Penalty {
    /// Common level `(2√2σ/√(nT))(1 + A log M/T)^{1/2}`.
    Multitask { a: f64 },
    /// Per-group levels from the Gram blocks with confidence exponent `q`.
    Groups { q: f64 },
}

const EVENT_GROUP: &str = "group-noise-below-half-penalty";
const EVENT_LASSO: &str = "coordinate-noise-below-half-penalty";
const NOT_UNIQUE_NOTE: &str =
    "bounds are checked for the solution returned by the solver; other minimizers of a non-unique problem are not examined";

fn gaussian_sigma(spec: &SimSpec, experiment: &str) -> Result<f64> {
    match spec.noise {
        crate::simulate::NoiseKind::Gaussian { sigma } => Ok(sigma),
        _ => Err(Error::Domain(format!("the {experiment} experiment needs Gaussian noise"))),
    }
}

fn gaussian_penalty(fx: &Fixture, sigma: f64, penalty: Penalty) -> Result<(Vec<f64>, f64)> {
    let spec = &fx.spec;
    match penalty {
        Penalty::Multitask { a } => {
            let (l, p) = lambda_multitask(sigma, spec.n, spec.tasks, spec.vars, a)?;
            Ok((vec![l; spec.vars], p))
        }
        Penalty::Groups { q } => {
            let t = lambda_groups(sigma, fx.n_obs(), q, &fx.gram, &fx.partition.sizes())?;
            Ok((t.lambda, t.probability))
        }
    }
}

/// RE constants at `s` and `2s` (cone factor 3) and at `s` with cone
/// factor 7: certified from coherence where possible, sampled otherwise.
fn kappa_info(fx: &Fixture, lambda: &[f64], opts: &HarnessOptions, seed: u64) -> Result<KappaInfo> {
    let m = fx.partition.len();
    let s = fx.spec.s.max(1);
    let alpha = |k: usize| match coherence_alpha(&fx.gram, &fx.partition, lambda, k) {
        Ok(a) => Ok(Some(a)),
        Err(Error::NonConstantDiagonal { .. }) => Ok(None),
        Err(e) => Err(e),
    };
    let alpha_s = alpha(s)?;
    let alpha_2s = alpha(2 * s)?;
    let phi = fx.gram.phi;
    let certified = |a: Option<f64>| -> Result<Option<f64>> {
        match (a, phi) {
            (Some(a), Some(phi)) if a > 1.0 => Ok(Some(re_from_coherence(a, phi)?)),
            _ => Ok(None),
        }
    };
    let sampled = |k: usize, cone: f64| re_sampled(&fx.gram, &fx.partition, lambda, k.min(m), cone, opts.cone_samples, seed);
    let cert_s = certified(alpha_s)?;
    let cert_2s = certified(alpha_2s)?;
    let kappa = match cert_s {
        Some(k) => k,
        None => sampled(s, 3.0)?,
    };
    let kappa_2s = match cert_2s {
        Some(k) => k,
        None => sampled(2 * s, 3.0)?,
    };
    // With Ψ = φI on every cone direction the ratio is √φ regardless of
    // the cone factor.
    let cone7_cert = matches!(alpha_s, Some(a) if a.is_infinite()) && phi.is_some();
    let kappa_cone7 = if cone7_cert { phi.unwrap().sqrt() } else { sampled(s, 7.0)? };
    Ok(KappaInfo {
        source: if cert_s.is_some() { "certified" } else { "heuristic" }.into(),
        kappa,
        kappa_2s: Some(kappa_2s),
        certified_2s: cert_2s.is_some(),
        kappa_cone7,
        certified_cone7: cone7_cert,
        alpha_s,
        alpha_2s,
    })
}

/// Group-wise errors of `β̂ − β*`.
struct Errors {
    prediction: f64,
    l21: f64,
    l2: f64,
    sup: f64,
    group_count: usize,
}

fn errors(fx: &Fixture, beta_hat: &[f64]) -> Errors {
    let delta: Vec<f64> = beta_hat.iter().zip(&fx.beta_star).map(|(a, b)| a - b).collect();
    let norms = fx.partition.group_norms(&delta);
    Errors {
        prediction: fx.gram.quadratic(&delta).max(0.0),
        l21: norms.iter().sum(),
        l2: delta.iter().map(|d| d * d).sum::<f64>().sqrt(),
        sup: norms.iter().cloned().fold(0.0, f64::max),
        group_count: fx.partition.support(beta_hat).len(),
    }
}

fn group_event(fx: &Fixture, xtw: &[f64], lambda: &[f64]) -> bool {
    fx.partition
        .group_norms(xtw)
        .iter()
        .zip(lambda)
        .all(|(g, l)| *g <= l / 2.0)
}

fn solve_trial(
    loss: &crate::solver::QuadraticLoss<'_>,
    partition: &GroupPartition,
    lambda: &[f64],
    opts: &HarnessOptions,
) -> Result<SolveResult> {
    let r = solve_quadratic(loss, partition, lambda, &opts.solve_options())?;
    if !r.converged {
        return Err(Error::NotConverged {
            iterations: r.iterations,
            residual: r.kkt_residual,
        });
    }
    Ok(r)
}

fn bound(id: &str, direction: Direction, target: f64, event: usize, certified: bool) -> BoundSpec {
    BoundSpec {
        id: id.into(),
        direction,
        target,
        event,
        certified,
        informational: false,
    }
}

/// Truncations of `β*` keeping its `k` largest groups, `k = 0..=|J|`, as
/// (support, `(1/N)‖X(β − β*)‖²`) pairs.
fn truncations(fx: &Fixture) -> Vec<(Vec<usize>, f64)> {
    let norms = fx.partition.group_norms(&fx.beta_star);
    let mut order = fx.support.clone();
    order.sort_by(|a, b| norms[*b].total_cmp(&norms[*a]).then(a.cmp(b)));
    (0..=order.len())
        .map(|k| {
            let kept = &order[..k];
            let mut delta = fx.beta_star.clone();
            for &j in kept {
                for &i in fx.partition.group(j) {
                    delta[i] = 0.0;
                }
            }
            // β* − β is the dropped part.
            let mut support = kept.to_vec();
            support.sort_unstable();
            (support, fx.gram.quadratic(&delta).max(0.0))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn finish_report(
    experiment: &str,
    config: Value,
    fx: &Fixture,
    seed: u64,
    lambda: Vec<f64>,
    kappa: Option<KappaInfo>,
    specs: &[BoundSpec],
    events: &[(&str, f64)],
    metric_names: &[&str],
    records: Vec<TrialRecord>,
    summary: Map<String, Value>,
    mut notes: Vec<String>,
    extra_pass: bool,
) -> CoverageReport {
    let bounds = aggregate(specs, &records);
    let events = summarize_events(events, &records);
    let metrics = (0..metric_names.len())
        .map(|i| Quantiles::of(&records.iter().map(|r| r.metrics[i]).collect::<Vec<_>>()))
        .collect();
    let passed = extra_pass && bounds.iter().filter(|b| !b.spec.informational).all(|b| b.passed);
    for b in &bounds {
        if b.hard_violations > 0 {
            notes.push(format!(
                "{}: {} violation(s) on trials where the guaranteeing event held",
                b.spec.id, b.hard_violations
            ));
        }
    }
    CoverageReport {
        experiment: experiment.into(),
        config,
        master_seed: seed,
        trials: records.len(),
        lambda,
        kappa,
        beta_star: fx.beta_star.clone(),
        support: fx.support.clone(),
        events,
        bounds,
        metric_names: metric_names.iter().map(|s| s.to_string()).collect(),
        metrics,
        summary,
        passed,
        notes,
        records,
    }
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    Ok(())
}

fn oracle_inputs(fx: &Fixture, lambda: &[f64], kappa: &KappaInfo) -> OracleInputs {
    OracleInputs {
        lambda: lambda.to_vec(),
        support: fx.support.clone(),
        kappa: kappa.kappa,
        kappa_2s: kappa.kappa_2s,
        phi_max: fx.gram.phi_max,
        s: fx.spec.s.max(1),
        beta_star_l21: Some(fx.partition.group_norms(&fx.beta_star).iter().sum()),
    }
}

/// Oracle-inequality coverage under Gaussian noise.
pub fn verify_oracle(
    spec: &SimSpec,
    penalty: Penalty,
    trials: usize,
    seed: u64,
    opts: &HarnessOptions,
) -> Result<CoverageReport> {
    check_trials(trials)?;
    let sigma = gaussian_sigma(spec, "oracle")?;
    let fx = Fixture::new(spec)?;
    let (lambda, target) = gaussian_penalty(&fx, sigma, penalty)?;
    let kappa = kappa_info(&fx, &lambda, opts, seed)?;
    let certified = kappa.source == "certified";
    let rhs: OracleRhs = oracle_rhs(&oracle_inputs(&fx, &lambda, &kappa))?;
    let bias = bias_rhs(&lambda, kappa.kappa_cone7, &truncations(&fx))?;

    let specs = vec![
        bound("slow-rate", Direction::Upper, target, 0, true),
        bound("prediction", Direction::Upper, target, 0, certified),
        bound("l21", Direction::Upper, target, 0, certified),
        bound("sparsity", Direction::Upper, target, 0, certified),
        bound("l2", Direction::Upper, target, 0, kappa.certified_2s),
        bound("prediction-with-bias", Direction::Upper, target, 0, kappa.certified_cone7),
    ];
    let rhs_values = [
        rhs.slow_rate.unwrap_or(f64::INFINITY),
        rhs.prediction,
        rhs.l21,
        rhs.sparsity.floor(),
        rhs.l2.unwrap_or(f64::INFINITY),
        bias,
    ];
    let metric_names = ["sup_error", "kkt_residual", "iterations"];

    let records: Vec<TrialRecord> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let ts = trial_seed(seed, t);
            let trial = fx.trial(ts)?;
            let r = solve_trial(&trial.loss, &fx.partition, &lambda, opts)?;
            let e = errors(&fx, &r.beta);
            Ok(TrialRecord {
                trial: t,
                seed: ts,
                events: vec![group_event(&fx, trial.xtw.as_slice(), &lambda)],
                lhs: vec![e.prediction, e.prediction, e.l21, e.group_count as f64, e.l2, e.prediction],
                rhs: rhs_values.to_vec(),
                metrics: vec![e.sup, r.kkt_residual, r.iterations as f64],
                beta_hat: r.beta,
                beta_lasso: None,
            })
        })
        .collect::<Result<_>>()?;

    let mut summary = Map::new();
    summary.insert("rhs".into(), serde_json::to_value(rhs).unwrap_or(Value::Null));
    summary.insert("rhs_prediction_with_bias".into(), json!(bias));
    if let Penalty::Multitask { a } = penalty {
        let t = spec.tasks as f64;
        let mt = multitask_rhs(&MultiTaskInputs {
            sigma,
            n: spec.n,
            tasks: spec.tasks,
            m: spec.vars,
            a,
            s: spec.s.max(1),
            kappa_mt: kappa.kappa * t.sqrt(),
            kappa_mt_2s: kappa.kappa_2s.map(|k| k * t.sqrt()),
            phi_mt: fx.gram.phi_max * t,
            beta_star_l21: Some(fx.partition.group_norms(&fx.beta_star).iter().sum()),
        })?;
        summary.insert("rhs_multitask_normalization".into(), serde_json::to_value(mt).unwrap_or(Value::Null));
    }
    let mut notes = vec![NOT_UNIQUE_NOTE.to_string()];
    if !certified {
        notes.push("RE constant is a sampled estimate; per-trial checks are diagnostics, not guarantees".into());
    }
    let events = [(EVENT_GROUP, target)];
    let mut report = finish_report(
        "oracle",
        json!({"sim": spec, "penalty": penalty, "trials": trials, "seed": seed, "options": opts}),
        &fx,
        seed,
        lambda,
        Some(kappa),
        &specs,
        &events,
        &metric_names,
        records,
        summary,
        notes,
        true,
    );
    let ev = &report.events[0];
    report.passed &= ev.frequency >= ev.floor;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareOptions {
    /// `A` in the Group Lasso level.
    pub a_group: f64,
    /// `A` in the Lasso level `r = Aσ√(φ log K / N)`.
    pub a_lasso: f64,
}

/// Group Lasso against the Lasso on the same data, with the Lasso lower
/// bounds checked on every trial where the Lasso's noise event holds.
pub fn compare_estimators(
    spec: &SimSpec,
    cmp: CompareOptions,
    trials: usize,
    seed: u64,
    opts: &HarnessOptions,
) -> Result<CoverageReport> {
    check_trials(trials)?;
    let sigma = gaussian_sigma(spec, "compare")?;
    let fx = Fixture::new(spec)?;
    let (lambda, target_group) = gaussian_penalty(&fx, sigma, Penalty::Multitask { a: cmp.a_group })?;
    let k = fx.partition.dim();
    let big_n = fx.n_obs();
    let phi = fx.gram.diag_max;
    let phi_max = fx.gram.phi_max;
    let r = lasso_level(cmp.a_lasso, sigma, phi, k, big_n);
    let target_lasso = 1.0 - (k as f64).powf(1.0 - cmp.a_lasso * cmp.a_lasso / 8.0);
    lasso_lower_rhs(cmp.a_lasso, sigma, phi, phi_max, k, big_n, 0)?;

    let singles = GroupPartition::singletons(k);
    let mut max_off = 0.0_f64;
    for a in 0..k {
        for b in 0..k {
            if a != b {
                max_off = max_off.max(fx.gram.psi[(a, b)].abs());
            }
        }
    }
    if max_off <= COHERENCE_ZERO_RTOL * phi {
        max_off = 0.0;
    }
    let m_prime_star = fx.beta_star.iter().filter(|b| **b != 0.0).count();
    let kappa_prime = if max_off == 0.0 {
        None
    } else {
        let alpha = coherence_alpha(&fx.gram, &singles, &vec![r; k], m_prime_star.max(1))?;
        if !(alpha > 1.0) {
            return Err(Error::Domain(
                "coherence does not certify the RE constant the Lasso signal condition needs".into(),
            ));
        }
        Some(re_from_coherence(alpha, fx.gram.phi.unwrap_or(phi))?)
    };
    let signal_bar = lasso_signal_threshold(r, m_prime_star, kappa_prime, max_off)?;
    let min_signal = fx
        .beta_star
        .iter()
        .enumerate()
        .filter(|(_, b)| **b != 0.0)
        .map(|(i, b)| (fx.gram.psi[(i, i)] * b).abs())
        .fold(f64::INFINITY, f64::min);
    if m_prime_star > 0 && !(min_signal > signal_bar) {
        return Err(Error::Domain(format!(
            "signal condition fails: min |Ψ_jj β*_j| = {min_signal} does not exceed {signal_bar}"
        )));
    }

    let specs = vec![
        bound("lasso-prediction-lower", Direction::Lower, target_lasso, 1, true),
        bound("lasso-l2-lower", Direction::Lower, target_lasso, 1, true),
        bound("lasso-support-size", Direction::Lower, target_lasso, 1, true),
    ];
    let metric_names = ["gl_prediction", "lasso_prediction", "gl_to_lasso_ratio", "gl_l2", "lasso_l2", "lasso_nonzeros"];
    let records: Vec<TrialRecord> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let ts = trial_seed(seed, t);
            let trial = fx.trial(ts)?;
            let gl = solve_trial(&trial.loss, &fx.partition, &lambda, opts)?;
            let lasso = solve_trial(&trial.loss, &singles, &vec![r; k], opts)?;
            let eg = errors(&fx, &gl.beta);
            let el = errors(&fx, &lasso.beta);
            let m_prime = lasso.beta.iter().filter(|b| **b != 0.0).count();
            let lower = lasso_lower_rhs(cmp.a_lasso, sigma, phi, phi_max, k, big_n, m_prime)?;
            let lasso_event = trial.xtw.iter().all(|v| v.abs() <= r / 2.0);
            Ok(TrialRecord {
                trial: t,
                seed: ts,
                events: vec![group_event(&fx, trial.xtw.as_slice(), &lambda), lasso_event],
                lhs: vec![el.prediction, el.l2, m_prime as f64],
                rhs: vec![lower.prediction, lower.l2, m_prime_star as f64],
                metrics: vec![
                    eg.prediction,
                    el.prediction,
                    eg.prediction / el.prediction,
                    eg.l2,
                    el.l2,
                    m_prime as f64,
                ],
                beta_hat: gl.beta,
                beta_lasso: Some(lasso.beta),
            })
        })
        .collect::<Result<_>>()?;

    let n_trials = records.len() as f64;
    let mean_gl = records.iter().map(|r| r.metrics[0]).sum::<f64>() / n_trials;
    let mean_lasso = records.iter().map(|r| r.metrics[1]).sum::<f64>() / n_trials;
    let gl_better = records.iter().filter(|r| r.metrics[0] < r.metrics[1]).count() as f64 / n_trials;
    let mut summary = Map::new();
    summary.insert("lasso_level".into(), json!(r));
    summary.insert("group_level".into(), json!(lambda[0]));
    summary.insert("signal_threshold".into(), json!(signal_bar));
    summary.insert("min_signal".into(), json!(min_signal));
    summary.insert("mean_gl_prediction".into(), json!(mean_gl));
    summary.insert("mean_lasso_prediction".into(), json!(mean_lasso));
    summary.insert("fraction_gl_better".into(), json!(gl_better));
    let events = [(EVENT_GROUP, target_group), (EVENT_LASSO, target_lasso)];
    Ok(finish_report(
        "compare",
        json!({"sim": spec, "compare": cmp, "trials": trials, "seed": seed, "options": opts}),
        &fx,
        seed,
        lambda,
        None,
        &specs,
        &events,
        &metric_names,
        records,
        summary,
        vec![NOT_UNIQUE_NOTE.to_string()],
        mean_gl < mean_lasso,
    ))
}

/// Oracle inequalities under noise with a bounded fourth moment.
pub fn verify_nongaussian(
    spec: &SimSpec,
    delta: f64,
    trials: usize,
    seed: u64,
    opts: &HarnessOptions,
) -> Result<CoverageReport> {
    check_trials(trials)?;
    let fx = Fixture::new(spec)?;
    let b = spec.noise.fourth_moment_root();
    let xs = x_star_of(&fx.designs);
    let tuning = lambda_nongaussian(xs, b, spec.n, spec.tasks, spec.vars, delta)?;
    let lambda = tuning.lambda.clone();
    let target = tuning.probability;
    let kappa = kappa_info(&fx, &lambda, opts, seed)?;
    let certified = kappa.source == "certified";
    let rhs = oracle_rhs(&oracle_inputs(&fx, &lambda, &kappa))?;
    let t = spec.tasks as f64;
    let alpha = kappa.alpha_s.filter(|a| *a > 1.0);
    let mt = nongaussian_rhs(&NonGaussianInputs {
        x_star: xs,
        b,
        n: spec.n,
        tasks: spec.tasks,
        m: spec.vars,
        delta,
        s: spec.s.max(1),
        kappa_mt: kappa.kappa * t.sqrt(),
        phi_mt: fx.gram.phi_max * t,
        beta_star_l21: Some(fx.partition.group_norms(&fx.beta_star).iter().sum()),
        alpha,
    })?;

    let mut specs = vec![
        bound("slow-rate", Direction::Upper, target, 0, true),
        bound("prediction", Direction::Upper, target, 0, certified),
        bound("l21", Direction::Upper, target, 0, certified),
        bound("sparsity", Direction::Upper, target, 0, certified),
        bound("l2", Direction::Upper, target, 0, kappa.certified_2s),
    ];
    let mut rhs_values = vec![
        rhs.slow_rate.unwrap_or(f64::INFINITY),
        rhs.prediction,
        rhs.l21,
        rhs.sparsity.floor(),
        rhs.l2.unwrap_or(f64::INFINITY),
    ];
    if let Some(sup) = mt.sup {
        let mut s = bound("sup-norm", Direction::Upper, target, 0, false);
        s.informational = true;
        specs.push(s);
        rhs_values.push(sup);
    }
    let with_sup = mt.sup.is_some();
    let metric_names = ["sup_error", "kkt_residual", "iterations"];
    let records: Vec<TrialRecord> = (0..trials as u64)
        .into_par_iter()
        .map(|tr| {
            let ts = trial_seed(seed, tr);
            let trial = fx.trial(ts)?;
            let r = solve_trial(&trial.loss, &fx.partition, &lambda, opts)?;
            let e = errors(&fx, &r.beta);
            let mut lhs = vec![e.prediction, e.prediction, e.l21, e.group_count as f64, e.l2];
            if with_sup {
                lhs.push(e.sup / t.sqrt());
            }
            Ok(TrialRecord {
                trial: tr,
                seed: ts,
                events: vec![group_event(&fx, trial.xtw.as_slice(), &lambda)],
                lhs,
                rhs: rhs_values.clone(),
                metrics: vec![e.sup, r.kkt_residual, r.iterations as f64],
                beta_hat: r.beta,
                beta_lasso: None,
            })
        })
        .collect::<Result<_>>()?;

    let mut notes = vec![NOT_UNIQUE_NOTE.to_string()];
    if tuning.vacuous {
        notes.push(format!(
            "warning: the guaranteed probability {target} is not positive at M = {}; the coverage target is vacuous",
            spec.vars
        ));
    }
    if !certified {
        notes.push("RE constant is a sampled estimate; per-trial checks are diagnostics, not guarantees".into());
    }
    let mut summary = Map::new();
    summary.insert("x_star".into(), json!(xs));
    summary.insert("b".into(), json!(b));
    summary.insert("probability".into(), json!(target));
    summary.insert("vacuous".into(), json!(tuning.vacuous));
    summary.insert("rhs".into(), serde_json::to_value(rhs).unwrap_or(Value::Null));
    summary.insert("rhs_multitask_normalization".into(), serde_json::to_value(mt).unwrap_or(Value::Null));
    let events = [(EVENT_GROUP, target)];
    Ok(finish_report(
        "nongauss",
        json!({"sim": spec, "delta": delta, "trials": trials, "seed": seed, "options": opts}),
        &fx,
        seed,
        lambda,
        Some(kappa),
        &specs,
        &events,
        &metric_names,
        records,
        summary,
        notes,
        true,
    ))
}

/// Exact support recovery by thresholding at `c λ_max / φ`.
pub fn verify_pattern_recovery(
    spec: &SimSpec,
    a: f64,
    trials: usize,
    seed: u64,
    opts: &HarnessOptions,
) -> Result<CoverageReport> {
    check_trials(trials)?;
    let sigma = gaussian_sigma(spec, "pattern")?;
    let fx = Fixture::new(spec)?;
    let (lambda, target) = gaussian_penalty(&fx, sigma, Penalty::Multitask { a })?;
    let phi = fx.gram.phi.ok_or(Error::NonConstantDiagonal {
        min: fx.gram.diag_min,
        max: fx.gram.diag_max,
    })?;
    let alpha = coherence_alpha(&fx.gram, &fx.partition, &lambda, spec.s.max(1))?;
    if !(alpha > 1.0) {
        return Err(Error::Domain(format!("coherence margin {alpha} does not exceed 1")));
    }
    let lmax = lambda.iter().cloned().fold(0.0, f64::max);
    if !min_signal_ok(&fx.beta_star, &fx.partition, lmax, phi, alpha)? {
        return Err(Error::Domain(format!(
            "signal too weak for recovery: every relevant group needs norm above {}",
            2.0 * sup_threshold(lmax, phi, alpha)?
        )));
    }
    let threshold = sup_threshold(lmax, phi, alpha)?;
    let radius = |p: f64| pnorm_radius(&lambda, &fx.support, alpha, phi, p);
    let (r1, r2) = (radius(1.0)?, radius(2.0)?);
    let specs = vec![
        bound("support-exact", Direction::Lower, target, 0, true),
        bound("sup-norm", Direction::Upper, target, 0, true),
        bound("l21-radius", Direction::Upper, target, 0, true),
        bound("l2-radius", Direction::Upper, target, 0, true),
    ];
    let metric_names = ["selected_groups", "kkt_residual"];
    let records: Vec<TrialRecord> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let ts = trial_seed(seed, t);
            let trial = fx.trial(ts)?;
            let r = solve_trial(&trial.loss, &fx.partition, &lambda, opts)?;
            let e = errors(&fx, &r.beta);
            let est = estimate_support(&r.beta, &fx.partition, lmax, phi, alpha)?;
            let exact = est.j_hat == fx.support;
            Ok(TrialRecord {
                trial: t,
                seed: ts,
                events: vec![group_event(&fx, trial.xtw.as_slice(), &lambda)],
                lhs: vec![f64::from(u8::from(exact)), e.sup, e.l21, e.l2],
                rhs: vec![1.0, threshold, r1, r2],
                metrics: vec![est.j_hat.len() as f64, r.kkt_residual],
                beta_hat: r.beta,
                beta_lasso: None,
            })
        })
        .collect::<Result<_>>()?;
    let exact = records.iter().filter(|r| r.lhs[0] == 1.0).count() as f64 / records.len() as f64;
    let mut summary = Map::new();
    summary.insert("threshold".into(), json!(threshold));
    summary.insert("recovery_frequency".into(), json!(exact));
    summary.insert("alpha".into(), if alpha.is_infinite() { json!("inf") } else { json!(alpha) });
    let events = [(EVENT_GROUP, target)];
    Ok(finish_report(
        "pattern",
        json!({"sim": spec, "a": a, "trials": trials, "seed": seed, "options": opts}),
        &fx,
        seed,
        lambda,
        None,
        &specs,
        &events,
        &metric_names,
        records,
        summary,
        vec![NOT_UNIQUE_NOTE.to_string()],
        true,
    ))
}
