//! Design-matrix assumption checks: block coherence, restricted eigenvalue
//! constants (certified and sampled), restricted extreme eigenvalues and
//! the row bound `x_*` used under non-Gaussian noise.

use itertools::Itertools;
use nalgebra::DMatrix;
use rand::seq::index::sample as sample_indices;
use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{max_eigenvalue, min_eigenvalue, principal_submatrix, GramSummary, GroupPartition, MultiTaskSpec};
use crate::rng::{stream, Stream};

/// Gram entries below `COHERENCE_ZERO_RTOL * φ` in magnitude are treated
/// as exact zeros by [`coherence_alpha`].
pub const COHERENCE_ZERO_RTOL: f64 = 1e-10;

/// Largest number of group subsets [`restricted_eigenvalues`] enumerates.
pub const MAX_SUBSETS: u128 = 1_000_000;

const CONE_CHUNK: usize = 1024;

/// Largest `α` for which the block coherence condition holds at sparsity
/// `s`. Each constrained entry must satisfy
/// `|entry| · scale ≤ λ_min φ / (14 α λ_max s)`, where `scale` is `K_j`
/// for off-diagonal entries inside group `j`, `1` for entries aligned at the
/// same in-group position across two groups and `√(K_j K_j')` for the
/// remaining cross-group entries.
///
/// Returns `f64::INFINITY` when every constrained entry vanishes. The value
/// is returned even when it is below 1.
#[allow(clippy::needless_range_loop)]
pub fn coherence_alpha(gram: &GramSummary, partition: &GroupPartition, lambda: &[f64], s: usize) -> Result<f64> {
    let phi = gram.phi.ok_or(Error::NonConstantDiagonal {
        min: gram.diag_min,
        max: gram.diag_max,
    })?;
    if !(phi > 0.0) {
        return Err(Error::Domain(format!("common diagonal must be positive, got {phi}")));
    }
    if s == 0 {
        return Err(Error::Domain("sparsity s must be at least 1".into()));
    }
    check_lambda(lambda, partition)?;
    let (lmin, lmax) = min_max(lambda);
    if !(lmax > 0.0) {
        return Err(Error::Domain("at least one penalty level must be positive".into()));
    }
    let k = partition.dim();
    let mut position = vec![0usize; k];
    for g in partition.groups() {
        for (t, &i) in g.iter().enumerate() {
            position[i] = t;
        }
    }
    let sizes = partition.sizes();
    let cutoff = COHERENCE_ZERO_RTOL * phi;
    let mut worst = 0.0_f64;
    for a in 0..k {
        let (ja, ta) = (partition.owner(a), position[a]);
        for b in (a + 1)..k {
            let v = gram.psi[(a, b)].abs().max(gram.psi[(b, a)].abs());
            if v <= cutoff {
                continue;
            }
            let (jb, tb) = (partition.owner(b), position[b]);
            let scale = if ja == jb {
                sizes[ja] as f64
            } else if ta == tb {
                1.0
            } else {
                ((sizes[ja] * sizes[jb]) as f64).sqrt()
            };
            worst = worst.max(v * scale);
        }
    }
    if worst == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(lmin * phi / (14.0 * lmax * s as f64 * worst))
}

/// Restricted eigenvalue constant certified by coherence:
/// `κ = √((1 − 1/α) φ)`.
pub fn re_from_coherence(alpha: f64, phi: f64) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(Error::Domain(format!("coherence margin must exceed 1, got {alpha}")));
    }
    if !(phi > 0.0) {
        return Err(Error::Domain(format!("phi must be positive, got {phi}")));
    }
    Ok(((1.0 - 1.0 / alpha) * phi).sqrt())
}

/// Ratios `‖XΔ‖/(√N ‖Δ_J‖)` for random `(J, Δ)` in the cone
/// `Σ_{J^c} λ_j‖Δ^j‖ ≤ cone_factor Σ_J λ_j‖Δ^j‖`, `|J| = s`.
///
/// `J` is uniform among `s`-subsets and `Δ_J` is Gaussian. The off-support
/// part is a Gaussian direction rescaled so its weighted norm is
/// `u · cone_factor · Σ_J λ_j‖Δ^j‖`: even-numbered samples sit on the
/// boundary (`u = 1`), odd-numbered ones inside (`u` uniform, with sample 1
/// pinned to `u = 0`). Samples are drawn in chunks of 1024; chunk `c`
/// uses the cone stream of seed `seed + c`. Samples whose `Δ_J` vanishes are
/// dropped.
pub fn cone_ratios(
    gram: &GramSummary,
    partition: &GroupPartition,
    lambda: &[f64],
    s: usize,
    cone_factor: f64,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let m = partition.len();
    if s == 0 || s > m {
        return Err(Error::Domain(format!("sparsity s must be in 1..={m}, got {s}")));
    }
    if n_samples == 0 {
        return Err(Error::Domain("at least one sample is required".into()));
    }
    if !(cone_factor > 0.0) {
        return Err(Error::Domain(format!("cone factor must be positive, got {cone_factor}")));
    }
    check_lambda(lambda, partition)?;
    partition.check_len("Gram", gram.dim())?;

    let chunks = n_samples.div_ceil(CONE_CHUNK);
    let per_chunk: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(seed.wrapping_add(c as u64), Stream::Cone);
            let start = c * CONE_CHUNK;
            let end = (start + CONE_CHUNK).min(n_samples);
            let k = partition.dim();
            let mut delta = vec![0.0; k];
            let mut in_support = vec![false; m];
            let mut out = Vec::with_capacity(end - start);
            for i in start..end {
                delta.iter_mut().for_each(|d| *d = 0.0);
                in_support.iter_mut().for_each(|f| *f = false);
                for j in sample_indices(&mut rng, m, s) {
                    in_support[j] = true;
                }
                let mut on_weight = 0.0;
                let mut on_sq = 0.0;
                for j in 0..m {
                    if in_support[j] {
                        for &idx in partition.group(j) {
                            let v: f64 = rng.sample(StandardNormal);
                            delta[idx] = v;
                            on_sq += v * v;
                        }
                        on_weight += lambda[j] * partition.block_norm(&delta, j);
                    }
                }
                let mut off_weight = 0.0;
                for j in (0..m).filter(|&j| !in_support[j]) {
                    for &idx in partition.group(j) {
                        delta[idx] = rng.sample(StandardNormal);
                    }
                    off_weight += lambda[j] * partition.block_norm(&delta, j);
                }
                let u = if i % 2 == 0 {
                    1.0
                } else if i == 1 {
                    0.0
                } else {
                    rng.random::<f64>()
                };
                let scale = if off_weight > 0.0 {
                    u * cone_factor * on_weight / off_weight
                } else {
                    0.0
                };
                for j in (0..m).filter(|&j| !in_support[j]) {
                    for &idx in partition.group(j) {
                        delta[idx] *= scale;
                    }
                }
                if on_sq == 0.0 {
                    continue;
                }
                let quad = gram.quadratic(&delta).max(0.0);
                out.push((quad / on_sq).sqrt());
            }
            out
        })
        .collect();
    Ok(per_chunk.into_iter().flatten().collect())
}

/// Sampled estimate of the restricted eigenvalue constant: the smallest
/// ratio returned by [`cone_ratios`]. This over-estimates the true
/// constant.
pub fn re_sampled(
    gram: &GramSummary,
    partition: &GroupPartition,
    lambda: &[f64],
    s: usize,
    cone_factor: f64,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    cone_ratios(gram, partition, lambda, s, cone_factor, n_samples, seed)?
        .into_iter()
        .reduce(f64::min)
        .ok_or(Error::Degenerate)
}

/// Restricted extreme eigenvalues `(κ1, κ2)`: square roots of the smallest
/// and largest eigenvalue of `Ψ` restricted to the columns of any
/// `min(2s, M)` groups.
pub fn restricted_eigenvalues(gram: &GramSummary, partition: &GroupPartition, s: usize) -> Result<(f64, f64)> {
    let m = partition.len();
    if s == 0 {
        return Err(Error::Domain("sparsity s must be at least 1".into()));
    }
    partition.check_len("Gram", gram.dim())?;
    let size = (2 * s).min(m);
    let subsets = binomial(m as u128, size as u128);
    if subsets > MAX_SUBSETS {
        return Err(Error::CombinatorialBlowup {
            subsets,
            limit: MAX_SUBSETS,
        });
    }
    let (lo, hi) = (0..m)
        .combinations(size)
        .par_bridge()
        .map(|groups| {
            let cols = partition.columns_of(&groups);
            let sub: DMatrix<f64> = principal_submatrix(&gram.psi, &cols);
            (min_eigenvalue(&sub), max_eigenvalue(&sub))
        })
        .reduce(
            || (f64::INFINITY, f64::NEG_INFINITY),
            |a, b| (a.0.min(b.0), a.1.max(b.1)),
        );
    Ok((lo.max(0.0).sqrt(), hi.max(0.0).sqrt()))
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
        if acc > u64::MAX as u128 {
            return acc;
        }
    }
    acc
}

/// Smallest `x_*` with `max_t (1/n) Σ_i max_j x_{tij}² ≤ x_*²`.
pub fn x_star(spec: &MultiTaskSpec) -> f64 {
    x_star_of(spec.designs())
}

/// [`x_star`] for a list of equally sized task designs.
pub fn x_star_of(designs: &[DMatrix<f64>]) -> f64 {
    designs
        .iter()
        .map(|x| {
            x.row_iter()
                .map(|r| r.iter().fold(0.0_f64, |m, v| m.max(v * v)))
                .sum::<f64>()
                / x.nrows() as f64
        })
        .fold(0.0, f64::max)
        .sqrt()
}

fn check_lambda(lambda: &[f64], partition: &GroupPartition) -> Result<()> {
    if lambda.len() != partition.len() {
        return Err(Error::Dimension(format!(
            "{} penalty levels for {} groups",
            lambda.len(),
            partition.len()
        )));
    }
    Ok(())
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// Settings for [`diagnose`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnoseOptions {
    pub s: usize,
    pub cone_factor: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for DiagnoseOptions {
    fn default() -> Self {
        Self {
            s: 1,
            cone_factor: 3.0,
            samples: 10_000,
            seed: 0,
        }
    }
}

/// Constants in the multi-task normalization, where the Gram is `XᵀX/n`
/// rather than `XᵀX/N`: `κ_MT = √T κ` and `φ_MT = T φ_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiTaskConstants {
    pub tasks: usize,
    pub phi_mt: f64,
    pub kappa_mt_cert: Option<f64>,
    pub kappa_mt_sampled: Option<f64>,
    pub kappa1_mt: Option<f64>,
    pub kappa2_mt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub phi: Option<f64>,
    pub phi_max: f64,
    #[serde(with = "crate::io::extended_f64")]
    pub coherence_alpha: Option<f64>,
    pub kappa_cert: Option<f64>,
    pub kappa_sampled: Option<f64>,
    pub kappa1: Option<f64>,
    pub kappa2: Option<f64>,
    pub x_star: Option<f64>,
    pub s: usize,
    pub cone_factor: f64,
    pub samples: usize,
    pub seed: u64,
    pub multitask: Option<MultiTaskConstants>,
    pub notes: Vec<String>,
}

/// Runs every applicable check. `tasks` switches on the multi-task
/// normalization; `x_star` is carried through when known.
pub fn diagnose(
    gram: &GramSummary,
    partition: &GroupPartition,
    lambda: &[f64],
    opts: &DiagnoseOptions,
    tasks: Option<usize>,
    x_star: Option<f64>,
) -> Result<DiagnosticsReport> {
    let mut notes = Vec::new();
    let alpha = match coherence_alpha(gram, partition, lambda, opts.s) {
        Ok(a) => Some(a),
        Err(e @ Error::NonConstantDiagonal { .. }) => {
            notes.push(format!("coherence not evaluated: {e}"));
            None
        }
        Err(e) => return Err(e),
    };
    let kappa_cert = match (alpha, gram.phi) {
        (Some(a), Some(phi)) if a > 1.0 => Some(re_from_coherence(a, phi)?),
        (Some(a), _) => {
            notes.push(format!("coherence margin {a} does not exceed 1; no certified RE constant"));
            None
        }
        _ => None,
    };
    let kappa_sampled = match re_sampled(gram, partition, lambda, opts.s, opts.cone_factor, opts.samples, opts.seed) {
        Ok(k) => Some(k),
        Err(e) => {
            notes.push(format!("sampled RE not available: {e}"));
            None
        }
    };
    let (kappa1, kappa2) = match restricted_eigenvalues(gram, partition, opts.s) {
        Ok((a, b)) => (Some(a), Some(b)),
        Err(e) => {
            notes.push(format!("restricted eigenvalues not computed: {e}"));
            (None, None)
        }
    };
    let multitask = tasks.map(|t| {
        let r = (t as f64).sqrt();
        MultiTaskConstants {
            tasks: t,
            phi_mt: gram.phi_max * t as f64,
            kappa_mt_cert: kappa_cert.map(|k| k * r),
            kappa_mt_sampled: kappa_sampled.map(|k| k * r),
            kappa1_mt: kappa1.map(|k| k * r),
            kappa2_mt: kappa2.map(|k| k * r),
        }
    });
    Ok(DiagnosticsReport {
        phi: gram.phi,
        phi_max: gram.phi_max,
        coherence_alpha: alpha,
        kappa_cert,
        kappa_sampled,
        kappa1,
        kappa2,
        x_star,
        s: opts.s,
        cone_factor: opts.cone_factor,
        samples: opts.samples,
        seed: opts.seed,
        multitask,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{gram_summary, GramSummary};
    use nalgebra::{DMatrix, DVector};

    fn gram_of(psi: DMatrix<f64>, part: &GroupPartition) -> GramSummary {
        GramSummary::from_psi(psi, part)
    }

    #[test]
    fn orthonormal_is_infinitely_coherent() {
        let part = GroupPartition::contiguous(&[2, 2, 1]).unwrap();
        let g = gram_of(DMatrix::identity(5, 5) * 0.25, &part);
        assert_eq!(coherence_alpha(&g, &part, &[1.0; 3], 2).unwrap(), f64::INFINITY);
    }

    #[test]
    fn singleton_coherence_matches_closed_form() {
        // α = φ / (14 s ρ) with ρ the largest off-diagonal.
        let rho = 0.01;
        let mut psi = DMatrix::from_element(4, 4, 0.3 * rho);
        psi[(0, 2)] = rho;
        psi[(2, 0)] = -rho;
        psi.fill_diagonal(2.0);
        let part = GroupPartition::singletons(4);
        let g = gram_of(psi, &part);
        let got = coherence_alpha(&g, &part, &[0.7; 4], 3).unwrap();
        assert!((got - 2.0 / (14.0 * 3.0 * rho)).abs() < 1e-12);
    }

    #[test]
    fn both_cross_group_families_bind_at_two() {
        let (d, o) = (1.0 / 28.0, 1.0 / 56.0);
        let psi = DMatrix::from_row_slice(4, 4, &[
            1.0, 0.0, d, o,
            0.0, 1.0, o, d,
            d, o, 1.0, 0.0,
            o, d, 0.0, 1.0,
        ]);
        let part = GroupPartition::contiguous(&[2, 2]).unwrap();
        let g = gram_of(psi.clone(), &part);
        let a = coherence_alpha(&g, &part, &[0.5, 0.5], 1).unwrap();
        assert!((a - 2.0).abs() < 1e-12);
        // Each family alone still binds at 2.
        let mut only_aligned = psi.clone();
        for (r, c) in [(0, 3), (3, 0), (1, 2), (2, 1)] {
            only_aligned[(r, c)] = 0.0;
        }
        let a1 = coherence_alpha(&gram_of(only_aligned, &part), &part, &[0.5, 0.5], 1).unwrap();
        assert!((a1 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unequal_lambda_shrinks_alpha() {
        let mut psi = DMatrix::identity(3, 3);
        psi[(0, 1)] = 0.001;
        psi[(1, 0)] = 0.001;
        let part = GroupPartition::singletons(3);
        let g = gram_of(psi, &part);
        let eq = coherence_alpha(&g, &part, &[1.0, 1.0, 1.0], 1).unwrap();
        let uneq = coherence_alpha(&g, &part, &[0.5, 1.0, 1.0], 1).unwrap();
        assert!((uneq - eq / 2.0).abs() < 1e-9);
    }

    #[test]
    fn non_constant_diagonal_is_rejected() {
        let part = GroupPartition::singletons(2);
        let g = gram_of(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0])), &part);
        assert!(matches!(
            coherence_alpha(&g, &part, &[1.0, 1.0], 1),
            Err(Error::NonConstantDiagonal { .. })
        ));
    }

    #[test]
    fn re_formula() {
        assert!((re_from_coherence(2.0, 1.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((re_from_coherence(1e12, 1.0).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(re_from_coherence(f64::INFINITY, 0.25).unwrap(), 0.5);
        assert!(re_from_coherence(1.0, 1.0).is_err());
    }

    #[test]
    fn identity_cone_minimum_is_one() {
        let part = GroupPartition::contiguous(&[2, 1, 3, 1]).unwrap();
        let g = gram_of(DMatrix::identity(7, 7), &part);
        let lam = [0.3, 0.5, 0.4, 0.9];
        let ratios = cone_ratios(&g, &part, &lam, 2, 3.0, 500, 11).unwrap();
        assert!(ratios.iter().all(|r| *r >= 1.0 - 1e-9));
        let k = re_sampled(&g, &part, &lam, 2, 3.0, 500, 11).unwrap();
        assert!(k <= 1.0 + 1e-9);
    }

    #[test]
    fn cone_sampling_is_reproducible() {
        let part = GroupPartition::contiguous(&[2, 2]).unwrap();
        let x = DMatrix::from_fn(6, 4, |i, j| ((i * 3 + j * 5) % 7) as f64 - 3.0);
        let g = gram_summary(&x, &part).unwrap();
        let a = re_sampled(&g, &part, &[1.0, 1.0], 1, 3.0, 1, 5).unwrap();
        let b = re_sampled(&g, &part, &[1.0, 1.0], 1, 3.0, 1, 5).unwrap();
        assert_eq!(a, b);
        let many_a = cone_ratios(&g, &part, &[1.0, 1.0], 1, 3.0, 3000, 9).unwrap();
        let many_b = cone_ratios(&g, &part, &[1.0, 1.0], 1, 3.0, 3000, 9).unwrap();
        assert_eq!(many_a, many_b);
    }

    #[test]
    fn duplicated_group_has_tiny_re() {
        let n = 20;
        let a = DVector::from_fn(n, |i, _| ((i * 7) % 11) as f64 - 5.0);
        let x = DMatrix::from_columns(&[a.clone(), a]);
        let part = GroupPartition::singletons(2);
        let g = gram_summary(&x, &part).unwrap();
        let k = re_sampled(&g, &part, &[1.0; 2], 1, 3.0, 10_000, 2024).unwrap();
        assert!(k <= 0.05, "sampled RE {k}");
    }

    #[test]
    fn larger_cone_cannot_raise_minimum() {
        let part = GroupPartition::contiguous(&[1, 2, 2]).unwrap();
        let x = DMatrix::from_fn(8, 5, |i, j| (((i + 1) * (j + 2)) % 5) as f64 - 2.0 + if i == j { 1.5 } else { 0.0 });
        let g = gram_summary(&x, &part).unwrap();
        let lam = [1.0, 0.6, 0.8];
        for seed in [1u64, 2, 3] {
            // Same directions, larger off-support scale: a different family, so
            // compare the cone-3 minimum against the cone-7 family that
            // contains it.
            let k3 = re_sampled(&g, &part, &lam, 1, 3.0, 4000, seed).unwrap();
            let r7 = cone_ratios(&g, &part, &lam, 1, 7.0, 4000, seed).unwrap();
            let r3 = cone_ratios(&g, &part, &lam, 1, 3.0, 4000, seed).unwrap();
            let k7 = r7.iter().chain(&r3).cloned().fold(f64::INFINITY, f64::min);
            assert!(k7 <= k3);
        }
    }

    #[test]
    fn restricted_eigen_examples() {
        let part = GroupPartition::singletons(2);
        let g = gram_of(DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 1.0])), &part);
        let (k1, k2) = restricted_eigenvalues(&g, &part, 1).unwrap();
        assert!((k1 - 1.0).abs() < 1e-14 && (k2 - 2.0).abs() < 1e-14);

        let part = GroupPartition::contiguous(&[2, 1, 2]).unwrap();
        let gi = gram_of(DMatrix::identity(5, 5), &part);
        for s in 1..=3 {
            let (a, b) = restricted_eigenvalues(&gi, &part, s).unwrap();
            assert!((a - 1.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
        }

        // K = 6 > N = 3; two groups of size 2 span 4 > rank columns.
        let x = DMatrix::from_fn(3, 6, |i, j| ((i * 5 + j * 2) % 7) as f64 - 3.0);
        let part = GroupPartition::contiguous(&[2, 2, 2]).unwrap();
        let (k1, _) = restricted_eigenvalues(&gram_summary(&x, &part).unwrap(), &part, 1).unwrap();
        assert!(k1 < 1e-6);
    }

    #[test]
    fn restricted_eigen_full_span_matches_spectrum() {
        let x = DMatrix::from_fn(9, 4, |i, j| ((i * 3 + j * j + 1) % 7) as f64 - 2.5);
        let part = GroupPartition::singletons(4);
        let g = gram_summary(&x, &part).unwrap();
        let (k1, k2) = restricted_eigenvalues(&g, &part, 2).unwrap();
        assert!((k2 * k2 - g.phi_max).abs() < 1e-10);
        assert!((k1 * k1 - min_eigenvalue(&g.psi)).abs() < 1e-10);
        let (_, k2_small) = restricted_eigenvalues(&g, &part, 1).unwrap();
        assert!(k2_small * k2_small <= g.phi_max + 1e-12);
    }

    #[test]
    fn enumeration_limit() {
        let part = GroupPartition::singletons(60);
        let g = GramSummary::with_phi_max(DMatrix::identity(60, 60), &part, 1.0);
        assert!(matches!(
            restricted_eigenvalues(&g, &part, 10),
            Err(Error::CombinatorialBlowup { .. })
        ));
    }

    #[test]
    fn x_star_examples() {
        let pm = DMatrix::from_fn(4, 3, |i, j| if (i + j) % 2 == 0 { 1.0 } else { -1.0 });
        let spec = MultiTaskSpec::new(vec![pm.clone(), -pm], vec![DVector::zeros(4); 2]).unwrap();
        assert_eq!(x_star(&spec), 1.0);
        let one = MultiTaskSpec::new(
            vec![DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 4.0])],
            vec![DVector::zeros(2)],
        )
        .unwrap();
        assert!((x_star(&one) - 12.5f64.sqrt()).abs() < 1e-15);
        let zero = MultiTaskSpec::new(vec![DMatrix::zeros(3, 2)], vec![DVector::zeros(3)]).unwrap();
        assert_eq!(x_star(&zero), 0.0);
    }
}
