//! Monte Carlo checks of the probability inequalities behind the
//! non-Gaussian results: the maximal moment inequality and the tail bound
//! for weighted centered chi-square sums.

use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream, Rng, Stream};
use crate::tuning::moment_constant;

const CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentDist {
    Gaussian,
    Rademacher,
    /// `Z ≡ 0`.
    Zero,
}

impl MomentDist {
    fn draw(self, rng: &mut Rng) -> f64 {
        match self {
            MomentDist::Gaussian => rng.sample(StandardNormal),
            MomentDist::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            MomentDist::Zero => 0.0,
        }
    }

    /// `E|ξ|^m`.
    pub fn abs_moment(self, m: u32) -> f64 {
        match self {
            MomentDist::Zero => 0.0,
            MomentDist::Rademacher => 1.0,
            MomentDist::Gaussian if m.is_multiple_of(2) => (1..m).step_by(2).map(f64::from).product(),
            MomentDist::Gaussian => {
                let k = (m - 1) / 2;
                (2.0 / std::f64::consts::PI).sqrt() * 2f64.powi(k as i32) * (1..=k).map(f64::from).product::<f64>()
            }
        }
    }
}

/// Running sums for a mean and its standard error.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.n += 1.0;
        self.sum += v;
        self.sum_sq += v * v;
    }

    fn merge(self, o: Self) -> Self {
        Self {
            n: self.n + o.n,
            sum: self.sum + o.sum,
            sum_sq: self.sum_sq + o.sum_sq,
        }
    }

    fn mean(&self) -> f64 {
        self.sum / self.n
    }

    fn se(&self) -> f64 {
        if self.n < 2.0 {
            return 0.0;
        }
        let mean = self.mean();
        let var = ((self.sum_sq - self.n * mean * mean) / (self.n - 1.0)).max(0.0);
        (var / self.n).sqrt()
    }
}

fn rel(se: f64, v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        se / v.abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleSumReport {
    /// Estimate of `E|Σ_i ξ_i|^m`.
    pub lhs: f64,
    pub lhs_se: f64,
    /// `[8 log c(m)]^{m/2} n^{m/2−1} Σ_i E|ξ_i|^m` with `c(m)` at `M = 1`.
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub m: u32,
    pub big_m: usize,
    pub n: usize,
    pub dist: MomentDist,
    pub n_mc: usize,
    pub seed: u64,
    /// `[8 log(c(m) M)]^{m/2}`.
    pub constant: f64,
    /// Estimate of `E max_j |Σ_i Z_ij|^m`.
    pub lhs: f64,
    pub lhs_se: f64,
    /// `constant · E[(max_j Σ_i Z_ij²)^{m/2}]`.
    pub rhs: f64,
    pub rhs_se: f64,
    pub rel_se: f64,
    pub holds: bool,
    /// Single-sum form with `M = 1`; evaluated for `m ≥ 2`.
    pub single: Option<SingleSumReport>,
}

/// Checks `E max_j |Σ_i (Z_ij − E Z_ij)|^m ≤ [8 log(c(m)M)]^{m/2}
/// E[(max_j Σ_i Z_ij²)^{m/2}]` for i.i.d. centered entries, declaring it
/// held when `lhs ≤ rhs (1 + 3 relSE)`, `relSE` combining both estimates.
pub fn verify_maximal_moment(m: u32, big_m: usize, n: usize, dist: MomentDist, n_mc: usize, seed: u64) -> Result<MomentReport> {
    if m == 0 {
        return Err(Error::Domain("moment order must be at least 1".into()));
    }
    if big_m == 0 || n == 0 {
        return Err(Error::Domain("M and n must be at least 1".into()));
    }
    if n_mc < 1000 {
        return Err(Error::Domain(format!("at least 1000 Monte Carlo repetitions are required, got {n_mc}")));
    }
    let mf = f64::from(m);
    let half = mf / 2.0;
    let chunks = n_mc.div_ceil(CHUNK);
    let parts: Vec<[Moments; 3]> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(seed.wrapping_add(c as u64), Stream::MonteCarlo);
            let reps = CHUNK.min(n_mc - c * CHUNK);
            let mut acc = [Moments::default(); 3];
            let mut sums = vec![0.0; big_m];
            let mut squares = vec![0.0; big_m];
            for _ in 0..reps {
                sums.iter_mut().for_each(|v| *v = 0.0);
                squares.iter_mut().for_each(|v| *v = 0.0);
                for _ in 0..n {
                    for j in 0..big_m {
                        let z = dist.draw(&mut rng);
                        sums[j] += z;
                        squares[j] += z * z;
                    }
                }
                let lhs = sums.iter().fold(0.0_f64, |a, s| a.max(s.abs())).powf(mf);
                let rhs = squares.iter().cloned().fold(0.0, f64::max).powf(half);
                acc[0].push(lhs);
                acc[1].push(rhs);
                acc[2].push(sums[0].abs().powf(mf));
            }
            acc
        })
        .collect();
    let [l, r, single] = parts.into_iter().fold([Moments::default(); 3], |a, b| {
        [a[0].merge(b[0]), a[1].merge(b[1]), a[2].merge(b[2])]
    });
    let constant = (8.0 * (moment_constant(mf, big_m)? * big_m as f64).ln()).powf(half);
    let lhs = l.mean();
    let rhs = constant * r.mean();
    let rhs_se = constant * r.se();
    let rel_se = (rel(l.se(), lhs).powi(2) + rel(rhs_se, rhs).powi(2)).sqrt();
    let holds = lhs <= rhs * (1.0 + 3.0 * rel_se);
    let single = if m >= 2 {
        let c1 = (8.0 * moment_constant(mf, 1)?.ln()).powf(half);
        let nf = n as f64;
        let bound = c1 * nf.powf(half - 1.0) * nf * dist.abs_moment(m);
        let lhs_single = single.mean();
        let se = single.se();
        Some(SingleSumReport {
            lhs: lhs_single,
            lhs_se: se,
            rhs: bound,
            holds: lhs_single <= bound * (1.0 + 3.0 * rel(se, lhs_single)),
        })
    } else {
        None
    };
    Ok(MomentReport {
        m,
        big_m,
        n,
        dist,
        n_mc,
        seed,
        constant,
        lhs,
        lhs_se: l.se(),
        rhs,
        rhs_se,
        rel_se,
        holds: holds && single.as_ref().is_none_or(|s| s.holds),
        single,
    })
}

/// `2 exp(−x² / (2(1 + √2 x m(v))))`.
pub fn chi2_tail_bound(x: f64, m_v: f64) -> f64 {
    2.0 * (-x * x / (2.0 * (1.0 + 2f64.sqrt() * x * m_v))).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chi2Point {
    pub x: f64,
    pub bound: f64,
    pub count: usize,
    pub frequency: f64,
    pub se: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chi2Report {
    pub n: usize,
    /// `m(v) = ‖v‖_∞ / ‖v‖`.
    pub m_v: f64,
    pub n_mc: usize,
    pub seed: u64,
    pub points: Vec<Chi2Point>,
    pub holds: bool,
}

/// Tail frequencies of `η_v = Σ_i (ξ_i² − 1) v_i / (√2 ‖v‖)` with standard
/// Gaussian `ξ_i`, each compared with [`chi2_tail_bound`] plus three
/// binomial standard errors.
pub fn verify_chi2_tail(v: &[f64], x_grid: &[f64], n_mc: usize, seed: u64) -> Result<Chi2Report> {
    let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Domain("weight vector must be nonzero and finite".into()));
    }
    if x_grid.is_empty() || x_grid.iter().any(|x| !(*x > 0.0)) {
        return Err(Error::Domain("tail grid must be non-empty and positive".into()));
    }
    if n_mc == 0 {
        return Err(Error::Domain("at least one repetition is required".into()));
    }
    let m_v = v.iter().fold(0.0_f64, |a, b| a.max(b.abs())) / norm;
    let scale = 1.0 / (2f64.sqrt() * norm);
    let chunks = n_mc.div_ceil(CHUNK);
    let counts: Vec<Vec<usize>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(seed.wrapping_add(c as u64), Stream::MonteCarlo);
            let reps = CHUNK.min(n_mc - c * CHUNK);
            let mut hits = vec![0usize; x_grid.len()];
            for _ in 0..reps {
                let eta = v
                    .iter()
                    .map(|w| {
                        let xi: f64 = rng.sample(StandardNormal);
                        (xi * xi - 1.0) * w
                    })
                    .sum::<f64>()
                    * scale;
                for (h, x) in hits.iter_mut().zip(x_grid) {
                    if eta.abs() > *x {
                        *h += 1;
                    }
                }
            }
            hits
        })
        .collect();
    let total: Vec<usize> = (0..x_grid.len()).map(|i| counts.iter().map(|c| c[i]).sum()).collect();
    let nf = n_mc as f64;
    let points: Vec<Chi2Point> = x_grid
        .iter()
        .zip(total)
        .map(|(&x, count)| {
            let p = count as f64 / nf;
            let se = (p * (1.0 - p) / nf).sqrt();
            let bound = chi2_tail_bound(x, m_v);
            Chi2Point {
                x,
                bound,
                count,
                frequency: p,
                se,
                holds: p <= bound + 3.0 * se,
            }
        })
        .collect();
    Ok(Chi2Report {
        n: v.len(),
        m_v,
        n_mc,
        seed,
        holds: points.iter().all(|p| p.holds),
        points,
    })
}
