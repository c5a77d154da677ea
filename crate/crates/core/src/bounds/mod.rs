//! Error bounds and the Monte Carlo experiments that check them.
//!
//! Each experiment fixes a design and a truth, redraws the noise for every
//! trial and records, per bound, the left-hand side, the right-hand side
//! and whether the inequality held. Bounds are guaranteed on a random
//! event (the noise correlations stay below half the penalty); the noise is
//! known in simulation so that event is evaluated exactly, and on trials
//! where it holds and the design constants are certified a failed bound is
//! counted as a hard violation.

mod experiments;
mod inequalities;
mod rhs;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use experiments::{
    compare_estimators, verify_nongaussian, verify_oracle, verify_pattern_recovery, CompareOptions, HarnessOptions,
    Penalty,
};
pub use inequalities::{
    chi2_tail_bound, verify_chi2_tail, verify_maximal_moment, Chi2Point, Chi2Report, MomentDist, MomentReport,
    SingleSumReport,
};
pub use rhs::{
    bias_rhs, lasso_level, lasso_lower_rhs, lasso_signal_threshold, multitask_rhs, nongaussian_rhs, oracle_rhs,
    LassoLowerRhs, MultiTaskInputs, MultiTaskRhs, NonGaussianInputs, NonGaussianRhs, OracleInputs, OracleRhs,
};

/// Relative and absolute slack allowed when comparing a computed error to
/// its bound; covers the solver's finite tolerance.
pub const REL_SLACK: f64 = 1e-9;
pub const ABS_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// `lhs ≤ rhs`.
    Upper,
    /// `lhs ≥ rhs`.
    Lower,
}

impl Direction {
    pub fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            Direction::Upper => lhs <= rhs * (1.0 + REL_SLACK) + ABS_SLACK,
            Direction::Lower => lhs >= rhs * (1.0 - REL_SLACK) - ABS_SLACK,
        }
    }
}

/// Static description of one bound within an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSpec {
    pub id: String,
    pub direction: Direction,
    /// Probability with which the bound is guaranteed.
    pub target: f64,
    /// Index into the experiment's events; the bound is guaranteed on it.
    pub event: usize,
    /// Failures on the event count as hard violations.
    pub certified: bool,
    /// Reported only; does not enter the pass decision.
    pub informational: bool,
}

/// Order statistics of a sample (nearest-rank quantiles).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub min: f64,
    pub q05: f64,
    pub median: f64,
    pub q95: f64,
    pub max: f64,
    pub mean: f64,
}

impl Quantiles {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let at = |q: f64| v[((q * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1];
        Some(Self {
            min: v[0],
            q05: at(0.05),
            median: at(0.5),
            q95: at(0.95),
            max: v[v.len() - 1],
            mean: v.iter().sum::<f64>() / v.len() as f64,
        })
    }
}

/// Three-sigma binomial floor `target − 3√(target(1 − target)/trials)`.
pub fn coverage_floor(target: f64, trials: usize) -> f64 {
    let t = target.clamp(0.0, 1.0);
    target - 3.0 * (t * (1.0 - t) / trials as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCoverage {
    #[serde(flatten)]
    pub spec: BoundSpec,
    pub trials: usize,
    pub satisfied: usize,
    pub coverage: f64,
    pub floor: f64,
    /// Trials on the bound's event.
    pub event_trials: usize,
    pub satisfied_on_event: usize,
    pub hard_violations: usize,
    pub lhs: Option<Quantiles>,
    pub rhs: Option<Quantiles>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventSummary {
    pub id: String,
    pub count: usize,
    pub frequency: f64,
    pub target: f64,
    pub floor: f64,
}

/// One Monte Carlo trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub events: Vec<bool>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    /// Extra per-trial values named by [`CoverageReport::metric_names`].
    pub metrics: Vec<f64>,
    pub beta_hat: Vec<f64>,
    pub beta_lasso: Option<Vec<f64>>,
}

impl TrialRecord {
    pub fn holds(&self, specs: &[BoundSpec], i: usize) -> bool {
        specs[i].direction.holds(self.lhs[i], self.rhs[i])
    }
}

/// How the RE constants feeding the bounds were obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaInfo {
    /// `"certified"` (from coherence) or `"heuristic"` (sampled).
    pub source: String,
    pub kappa: f64,
    pub kappa_2s: Option<f64>,
    pub certified_2s: bool,
    /// RE constant for the larger cone used by the bias bound.
    pub kappa_cone7: f64,
    pub certified_cone7: bool,
    #[serde(with = "crate::io::extended_f64")]
    pub alpha_s: Option<f64>,
    #[serde(with = "crate::io::extended_f64")]
    pub alpha_2s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub experiment: String,
    /// Fully resolved configuration.
    pub config: serde_json::Value,
    pub master_seed: u64,
    pub trials: usize,
    pub lambda: Vec<f64>,
    pub kappa: Option<KappaInfo>,
    pub beta_star: Vec<f64>,
    pub support: Vec<usize>,
    pub events: Vec<EventSummary>,
    pub bounds: Vec<BoundCoverage>,
    pub metric_names: Vec<String>,
    pub metrics: Vec<Option<Quantiles>>,
    /// Scalar summaries specific to the experiment.
    pub summary: serde_json::Map<String, serde_json::Value>,
    pub passed: bool,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub records: Vec<TrialRecord>,
}

impl CoverageReport {
    pub fn bound(&self, id: &str) -> Option<&BoundCoverage> {
        self.bounds.iter().find(|b| b.spec.id == id)
    }

    pub fn event(&self, id: &str) -> Option<&EventSummary> {
        self.events.iter().find(|e| e.id == id)
    }

    pub fn metric(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.metric_names.iter().position(|m| m == name)?;
        Some(self.records.iter().map(|r| r.metrics[i]).collect())
    }

    /// Per-trial CSV: seed, event indicators, then `lhs`, `rhs`, `ok` for
    /// every bound and the extra metrics.
    pub fn write_records_csv(&self, path: &Path) -> Result<()> {
        let specs: Vec<BoundSpec> = self.bounds.iter().map(|b| b.spec.clone()).collect();
        let io = |e: csv::Error| Error::Io {
            path: path.display().to_string(),
            source: std::io::Error::other(e),
        };
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        let mut header = vec!["trial".to_string(), "seed".to_string()];
        header.extend(self.events.iter().map(|e| format!("event_{}", e.id)));
        for s in &specs {
            header.extend([format!("{}_lhs", s.id), format!("{}_rhs", s.id), format!("{}_ok", s.id)]);
        }
        header.extend(self.metric_names.iter().cloned());
        w.write_record(&header).map_err(io)?;
        for r in &self.records {
            let mut row = vec![r.trial.to_string(), r.seed.to_string()];
            row.extend(r.events.iter().map(|e| u8::from(*e).to_string()));
            for i in 0..specs.len() {
                row.extend([r.lhs[i].to_string(), r.rhs[i].to_string(), u8::from(r.holds(&specs, i)).to_string()]);
            }
            row.extend(r.metrics.iter().map(f64::to_string));
            w.write_record(&row).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })
    }
}

/// Counts, floors and hard violations for every bound.
pub(crate) fn aggregate(specs: &[BoundSpec], records: &[TrialRecord]) -> Vec<BoundCoverage> {
    let trials = records.len();
    specs
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let ok: Vec<bool> = records.iter().map(|r| r.holds(specs, i)).collect();
            let satisfied = ok.iter().filter(|b| **b).count();
            let on_event: Vec<bool> = records.iter().map(|r| r.events[spec.event]).collect();
            let event_trials = on_event.iter().filter(|b| **b).count();
            let satisfied_on_event = ok.iter().zip(&on_event).filter(|(o, e)| **o && **e).count();
            let hard_violations = if spec.certified { event_trials - satisfied_on_event } else { 0 };
            let coverage = if trials == 0 { 0.0 } else { satisfied as f64 / trials as f64 };
            let floor = coverage_floor(spec.target, trials.max(1));
            let lhs: Vec<f64> = records.iter().map(|r| r.lhs[i]).collect();
            let rhs: Vec<f64> = records.iter().map(|r| r.rhs[i]).collect();
            BoundCoverage {
                spec: spec.clone(),
                trials,
                satisfied,
                coverage,
                floor,
                event_trials,
                satisfied_on_event,
                hard_violations,
                lhs: Quantiles::of(&lhs),
                rhs: Quantiles::of(&rhs),
                passed: hard_violations == 0 && coverage >= floor,
            }
        })
        .collect()
}

pub(crate) fn summarize_events(names: &[(&str, f64)], records: &[TrialRecord]) -> Vec<EventSummary> {
    let trials = records.len().max(1);
    names
        .iter()
        .enumerate()
        .map(|(i, (id, target))| {
            let count = records.iter().filter(|r| r.events[i]).count();
            EventSummary {
                id: id.to_string(),
                count,
                frequency: count as f64 / trials as f64,
                target: *target,
                floor: coverage_floor(*target, trials),
            }
        })
        .collect()
}
