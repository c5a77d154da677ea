//! Seeded generators for group-sparse truths, multi-task designs and noise.
//!
//! A [`SimSpec`] fixes everything. Its seed drives three independent
//! streams: the design, the signal (support and placement) and the noise.
//! Monte Carlo trials keep the design and the truth and redraw only the
//! noise, from the seed `master ^ trial`.

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample as sample_indices;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{assemble_multitask, multitask_gram_summary, GramSummary, GroupPartition, MultiTaskSpec, RegressionData};
use crate::rng::{stream, Rng, Stream};
use crate::solver::QuadraticLoss;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DesignKind {
    /// `X_t = √n Q_t` with `Q_t` orthonormal columns, so `X_tᵀX_t/n = I`.
    OrthonormalTasks,
    /// Gaussian entries, each column rescaled to `‖x‖²/n = 1`.
    GaussianNormalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NoiseKind {
    Gaussian { sigma: f64 },
    Rademacher { scale: f64 },
    /// Student t with `df` degrees of freedom, standardized to unit variance
    /// and multiplied by `scale`.
    StudentT { df: f64, scale: f64 },
}

impl NoiseKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseKind::Gaussian { sigma } if !(sigma >= 0.0) || !sigma.is_finite() => {
                Err(Error::Domain(format!("sigma must be finite and >= 0, got {sigma}")))
            }
            NoiseKind::Rademacher { scale } | NoiseKind::StudentT { scale, .. } if !(scale >= 0.0) || !scale.is_finite() => {
                Err(Error::Domain(format!("noise scale must be finite and >= 0, got {scale}")))
            }
            NoiseKind::StudentT { df, .. } if !(df >= 5.0) => Err(Error::Domain(format!(
                "student-t noise needs df >= 5 for a finite fourth moment, got {df}"
            ))),
            _ => Ok(()),
        }
    }

    /// `σ` for Gaussian noise, otherwise `b` with `E W⁴ = b⁴`.
    pub fn level(&self) -> f64 {
        match *self {
            NoiseKind::Gaussian { sigma } => sigma,
            NoiseKind::Rademacher { scale } => scale,
            NoiseKind::StudentT { df, scale } => scale * (3.0 * (df - 2.0) / (df - 4.0)).powf(0.25),
        }
    }

    /// `(E W⁴)^{1/4}`.
    pub fn fourth_moment_root(&self) -> f64 {
        match *self {
            NoiseKind::Gaussian { sigma } => 3f64.powf(0.25) * sigma,
            _ => self.level(),
        }
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self, NoiseKind::Gaussian { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pattern {
    /// Every task of a relevant group carries the amplitude.
    DenseInGroup,
    /// One randomly chosen task per relevant group carries the amplitude.
    SingleEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub n: usize,
    pub tasks: usize,
    pub vars: usize,
    pub s: usize,
    pub design: DesignKind,
    pub noise: NoiseKind,
    pub amplitude: f64,
    pub pattern: Pattern,
    pub seed: u64,
}

impl SimSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.tasks == 0 || self.vars == 0 {
            return Err(Error::Domain("n, tasks and vars must be at least 1".into()));
        }
        if self.s > self.vars {
            return Err(Error::Domain(format!("s = {} exceeds vars = {}", self.s, self.vars)));
        }
        if self.design == DesignKind::OrthonormalTasks && self.n < self.vars {
            return Err(Error::Domain(format!(
                "orthonormal design needs n >= vars, got n = {} < {}",
                self.n, self.vars
            )));
        }
        if !self.amplitude.is_finite() {
            return Err(Error::Domain("amplitude must be finite".into()));
        }
        self.noise.validate()
    }

    /// `N = nT`.
    pub fn n_obs(&self) -> usize {
        self.n * self.tasks
    }
}

/// Group-sparse truth in the stacked layout (entry `t·vars + j`) and its
/// sorted support.
pub fn gen_beta(
    vars: usize,
    tasks: usize,
    s: usize,
    amplitude: f64,
    pattern: Pattern,
    rng: &mut Rng,
) -> Result<(Vec<f64>, Vec<usize>)> {
    if s > vars {
        return Err(Error::Domain(format!("s = {s} exceeds vars = {vars}")));
    }
    let mut support = sample_indices(rng, vars, s).into_vec();
    support.sort_unstable();
    let mut beta = vec![0.0; vars * tasks];
    for &j in &support {
        match pattern {
            Pattern::DenseInGroup => (0..tasks).for_each(|t| beta[t * vars + j] = amplitude),
            Pattern::SingleEntry => beta[rng.random_range(0..tasks) * vars + j] = amplitude,
        }
    }
    if amplitude == 0.0 {
        support.clear();
    }
    Ok((beta, support))
}

pub fn gen_design(kind: DesignKind, n: usize, vars: usize, tasks: usize, rng: &mut Rng) -> Result<Vec<DMatrix<f64>>> {
    if kind == DesignKind::OrthonormalTasks && n < vars {
        return Err(Error::Domain(format!("orthonormal design needs n >= vars, got {n} < {vars}")));
    }
    let root_n = (n as f64).sqrt();
    Ok((0..tasks)
        .map(|_| {
            let g = DMatrix::from_fn(n, vars, |_, _| rng.sample::<f64, _>(StandardNormal));
            match kind {
                DesignKind::OrthonormalTasks => g.qr().q() * root_n,
                DesignKind::GaussianNormalized => {
                    let mut x = g;
                    for mut col in x.column_iter_mut() {
                        let scale = root_n / col.norm();
                        col *= scale;
                    }
                    x
                }
            }
        })
        .collect())
}

pub fn gen_noise(kind: &NoiseKind, len: usize, rng: &mut Rng) -> Result<DVector<f64>> {
    kind.validate()?;
    Ok(match *kind {
        NoiseKind::Gaussian { sigma } => DVector::from_fn(len, |_, _| sigma * rng.sample::<f64, _>(StandardNormal)),
        NoiseKind::Rademacher { scale } => {
            DVector::from_fn(len, |_, _| if rng.random::<bool>() { scale } else { -scale })
        }
        NoiseKind::StudentT { df, scale } => {
            let dist = StudentT::new(df).map_err(|e| Error::Domain(e.to_string()))?;
            let unit = (df / (df - 2.0)).sqrt();
            DVector::from_fn(len, |_, _| scale * dist.sample(rng) / unit)
        }
    })
}

/// Generator parameters recorded alongside a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub spec: SimSpec,
    pub generator: String,
    pub noise_seed: u64,
    pub noise_level: f64,
    pub support: Vec<usize>,
    pub n_obs: usize,
    pub dim: usize,
}

/// One synthetic multi-task dataset.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub tasks: MultiTaskSpec,
    pub data: RegressionData,
    pub beta_star: Vec<f64>,
    pub support: Vec<usize>,
    /// Stacked noise vector `W`.
    pub noise: DVector<f64>,
    pub metadata: Metadata,
}

pub fn simulate_dataset(spec: &SimSpec) -> Result<Dataset> {
    Fixture::new(spec)?.dataset(spec.seed)
}

/// Design and truth shared by all Monte Carlo trials of one experiment,
/// with the Gram matrix computed once.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub spec: SimSpec,
    pub designs: Vec<DMatrix<f64>>,
    pub beta_star: Vec<f64>,
    pub support: Vec<usize>,
    pub partition: GroupPartition,
    pub gram: GramSummary,
    signal: Vec<DVector<f64>>,
}

/// Normal-equation view of one trial.
#[derive(Debug, Clone)]
pub struct Trial<'a> {
    pub seed: u64,
    pub loss: QuadraticLoss<'a>,
    /// `XᵀW/N`.
    pub xtw: DVector<f64>,
    pub noise: DVector<f64>,
}

impl Fixture {
    pub fn new(spec: &SimSpec) -> Result<Self> {
        spec.validate()?;
        let designs = gen_design(spec.design, spec.n, spec.vars, spec.tasks, &mut stream(spec.seed, Stream::Design))?;
        let (beta_star, support) = gen_beta(
            spec.vars,
            spec.tasks,
            spec.s,
            spec.amplitude,
            spec.pattern,
            &mut stream(spec.seed, Stream::Signal),
        )?;
        let m = spec.vars;
        let signal = designs
            .iter()
            .enumerate()
            .map(|(t, x)| x * DVector::from_column_slice(&beta_star[t * m..(t + 1) * m]))
            .collect();
        let zero = vec![DVector::zeros(spec.n); spec.tasks];
        let gram = multitask_gram_summary(&MultiTaskSpec::new(designs.clone(), zero)?);
        Ok(Self {
            spec: spec.clone(),
            partition: crate::model::multitask_partition(spec.vars, spec.tasks),
            designs,
            beta_star,
            support,
            gram,
            signal,
        })
    }

    pub fn n_obs(&self) -> usize {
        self.spec.n_obs()
    }

    fn draw_noise(&self, seed: u64) -> Result<DVector<f64>> {
        gen_noise(&self.spec.noise, self.n_obs(), &mut stream(seed, Stream::Noise))
    }

    fn responses(&self, noise: &DVector<f64>) -> Vec<DVector<f64>> {
        let n = self.spec.n;
        self.signal
            .iter()
            .enumerate()
            .map(|(t, s)| s + noise.rows(t * n, n))
            .collect()
    }

    /// `Xᵀv/N` for a stacked length-`N` vector, task by task.
    pub fn xt_times(&self, v: &DVector<f64>) -> DVector<f64> {
        let (n, m) = (self.spec.n, self.spec.vars);
        let big_n = self.n_obs() as f64;
        let mut out = DVector::zeros(m * self.spec.tasks);
        for (t, x) in self.designs.iter().enumerate() {
            let block = x.tr_mul(&v.rows(t * n, n).into_owned()) / big_n;
            out.rows_mut(t * m, m).copy_from(&block);
        }
        out
    }

    pub fn trial(&self, seed: u64) -> Result<Trial<'_>> {
        let noise = self.draw_noise(seed)?;
        let big_n = self.n_obs() as f64;
        let ys = self.responses(&noise);
        let y = DVector::from_iterator(self.n_obs(), ys.iter().flat_map(|v| v.iter().cloned()));
        let loss = QuadraticLoss {
            psi: &self.gram.psi,
            xty: self.xt_times(&y),
            yty: y.norm_squared() / big_n,
            phi_max: self.gram.phi_max,
        };
        Ok(Trial {
            seed,
            loss,
            xtw: self.xt_times(&noise),
            noise,
        })
    }

    /// Full dataset for the given noise seed.
    pub fn dataset(&self, noise_seed: u64) -> Result<Dataset> {
        let noise = self.draw_noise(noise_seed)?;
        let tasks = MultiTaskSpec::new(self.designs.clone(), self.responses(&noise))?;
        let data = assemble_multitask(&tasks);
        Ok(Dataset {
            metadata: Metadata {
                spec: self.spec.clone(),
                generator: "ChaCha8Rng::seed_from_u64, streams design=1 signal=2 noise=3".into(),
                noise_seed,
                noise_level: self.spec.noise.level(),
                support: self.support.clone(),
                n_obs: self.n_obs(),
                dim: self.partition.dim(),
            },
            tasks,
            data,
            beta_star: self.beta_star.clone(),
            support: self.support.clone(),
            noise,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{solve_group_lasso, SolveOptions};

    fn base(design: DesignKind, noise: NoiseKind) -> SimSpec {
        SimSpec {
            n: 12,
            tasks: 3,
            vars: 5,
            s: 2,
            design,
            noise,
            amplitude: 1.0,
            pattern: Pattern::DenseInGroup,
            seed: 99,
        }
    }

    #[test]
    fn beta_patterns() {
        let mut rng = stream(1, Stream::Signal);
        let (b, j) = gen_beta(6, 4, 0, 1.0, Pattern::DenseInGroup, &mut rng).unwrap();
        assert!(b.iter().all(|v| *v == 0.0) && j.is_empty());
        let (b, j) = gen_beta(6, 4, 6, 1.0, Pattern::DenseInGroup, &mut rng).unwrap();
        let part = crate::model::multitask_partition(6, 4);
        assert_eq!(j, (0..6).collect::<Vec<_>>());
        assert!(part.group_norms(&b).iter().all(|n| (n - 2.0).abs() < 1e-15));
        let (b, j) = gen_beta(6, 4, 3, 2.0, Pattern::SingleEntry, &mut rng).unwrap();
        assert_eq!(part.support(&b), j);
        assert_eq!(b.iter().filter(|v| **v != 0.0).count(), 3);
        let a = gen_beta(9, 2, 4, 1.0, Pattern::DenseInGroup, &mut stream(5, Stream::Signal)).unwrap();
        let c = gen_beta(9, 2, 4, 1.0, Pattern::DenseInGroup, &mut stream(5, Stream::Signal)).unwrap();
        assert_eq!(a, c);
        assert!(gen_beta(3, 2, 4, 1.0, Pattern::DenseInGroup, &mut rng).is_err());
    }

    #[test]
    fn designs_are_normalized() {
        for kind in [DesignKind::OrthonormalTasks, DesignKind::GaussianNormalized] {
            let xs = gen_design(kind, 20, 7, 3, &mut stream(3, Stream::Design)).unwrap();
            for x in &xs {
                let g = x.tr_mul(x) / 20.0;
                for i in 0..7 {
                    assert!((g[(i, i)] - 1.0).abs() < 1e-12);
                    if kind == DesignKind::OrthonormalTasks {
                        for k in 0..7 {
                            let e = if i == k { 1.0 } else { 0.0 };
                            assert!((g[(i, k)] - e).abs() <= 1e-10);
                        }
                    }
                }
            }
            let again = gen_design(kind, 20, 7, 3, &mut stream(3, Stream::Design)).unwrap();
            assert_eq!(xs, again);
        }
        assert!(gen_design(DesignKind::OrthonormalTasks, 4, 5, 1, &mut stream(0, Stream::Design)).is_err());
    }

    #[test]
    fn noise_kinds() {
        let mut rng = stream(4, Stream::Noise);
        let r = gen_noise(&NoiseKind::Rademacher { scale: 1.0 }, 1000, &mut rng).unwrap();
        assert!(r.iter().all(|v| v.abs() == 1.0));
        assert_eq!(NoiseKind::Rademacher { scale: 1.0 }.level(), 1.0);
        let z = gen_noise(&NoiseKind::Gaussian { sigma: 0.0 }, 50, &mut rng).unwrap();
        assert!(z.iter().all(|v| *v == 0.0));
        let b = NoiseKind::StudentT { df: 5.0, scale: 1.0 }.level();
        assert!((b - 9f64.powf(0.25)).abs() < 1e-15);
        assert!((b - 1.7321).abs() < 1e-4);
        assert!(NoiseKind::StudentT { df: 4.5, scale: 1.0 }.validate().is_err());
    }

    #[test]
    fn noise_means_are_centered() {
        let n = 100_000;
        for kind in [
            NoiseKind::Gaussian { sigma: 2.0 },
            NoiseKind::Rademacher { scale: 0.5 },
            NoiseKind::StudentT { df: 6.0, scale: 1.0 },
        ] {
            let w = gen_noise(&kind, n, &mut stream(17, Stream::Noise)).unwrap();
            let mean = w.mean();
            let sd = (w.map(|v| (v - mean).powi(2)).sum() / (n as f64 - 1.0)).sqrt();
            assert!(mean.abs() <= 4.0 * sd / (n as f64).sqrt(), "{kind:?}: mean {mean}");
        }
    }

    #[test]
    fn student_t_fourth_moment() {
        // Standardized t_ν: E W⁴ = 3(ν−2)/(ν−4). Check at ν = 9 where the
        // eighth moment is finite and the standard error is meaningful.
        let df = 9.0;
        let kind = NoiseKind::StudentT { df, scale: 1.0 };
        let n = 1_000_000;
        let w = gen_noise(&kind, n, &mut stream(23, Stream::Noise)).unwrap();
        let fourth: Vec<f64> = w.iter().map(|v| v.powi(4)).collect();
        let mean = fourth.iter().sum::<f64>() / n as f64;
        let var = fourth.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        let se = (var / n as f64).sqrt();
        let expect = kind.level().powi(4);
        assert!((mean - expect).abs() <= 3.0 * se, "{mean} vs {expect} (se {se})");
    }

    #[test]
    fn noiseless_ols_recovers_truth() {
        let spec = base(DesignKind::OrthonormalTasks, NoiseKind::Gaussian { sigma: 0.0 });
        let d = simulate_dataset(&spec).unwrap();
        let problem = d.data.clone().with_lambda(vec![0.0; spec.vars]).unwrap();
        let r = solve_group_lasso(&problem, &SolveOptions { tol: Some(1e-12), ..Default::default() }).unwrap();
        for (a, b) in r.beta.iter().zip(&d.beta_star) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn empty_truth_leaves_pure_noise() {
        let mut spec = base(DesignKind::GaussianNormalized, NoiseKind::Rademacher { scale: 1.0 });
        spec.s = 0;
        let d = simulate_dataset(&spec).unwrap();
        assert_eq!(d.data.y, d.noise);
        assert!(d.support.is_empty());
    }

    #[test]
    fn datasets_are_deterministic_and_consistent_with_trials() {
        let spec = base(DesignKind::GaussianNormalized, NoiseKind::Gaussian { sigma: 0.7 });
        let a = simulate_dataset(&spec).unwrap();
        let b = simulate_dataset(&spec).unwrap();
        assert_eq!(a.data.x, b.data.x);
        assert_eq!(a.data.y, b.data.y);
        let fx = Fixture::new(&spec).unwrap();
        let trial = fx.trial(spec.seed).unwrap();
        let n = spec.n_obs() as f64;
        let direct = a.data.x.tr_mul(&a.data.y) / n;
        assert!((direct - &trial.loss.xty).amax() < 1e-12);
        assert!((a.data.y.norm_squared() / n - trial.loss.yty).abs() < 1e-12);
        let xtw = a.data.x.tr_mul(&a.noise) / n;
        assert!((xtw - &trial.xtw).amax() < 1e-12);
    }
}
