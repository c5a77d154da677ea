//! Reference computations shared by the integration tests. Nothing here
//! calls the library's solver or bound formulas.

#![allow(dead_code)]

use glasso_core::GroupPartition;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

pub fn gaussian_vector(len: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(len, |_, _| rng.sample(StandardNormal))
}

/// Random contiguous partition of `dim` columns into `groups` non-empty groups.
pub fn random_sizes(dim: usize, groups: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut sizes = vec![1; groups];
    for _ in groups..dim {
        sizes[rng.random_range(0..groups)] += 1;
    }
    sizes
}

/// `(1/N)‖Xβ − y‖² + 2 Σ_j λ_j ‖β^j‖`, evaluated directly.
pub fn objective(x: &DMatrix<f64>, y: &DVector<f64>, part: &GroupPartition, lambda: &[f64], beta: &[f64]) -> f64 {
    let b = DVector::from_column_slice(beta);
    let r = x * b - y;
    let mut pen = 0.0;
    for (j, g) in part.groups().iter().enumerate() {
        pen += lambda[j] * g.iter().map(|&i| beta[i] * beta[i]).sum::<f64>().sqrt();
    }
    r.norm_squared() / x.nrows() as f64 + 2.0 * pen
}

/// Exact minimizer of `bᵀAb − 2bᵀc + 2λ‖b‖` for symmetric PSD `A`.
///
/// Zero when `‖c‖ ≤ λ`; otherwise `b = (A + μI)⁻¹c` with `μ = λ/‖b‖`,
/// found by bisection on the increasing map `μ ↦ μ‖(A + μI)⁻¹c‖`.
pub fn block_minimizer(a: &DMatrix<f64>, c: &DVector<f64>, lambda: f64) -> DVector<f64> {
    let cn = c.norm();
    if cn <= lambda {
        return DVector::zeros(c.len());
    }
    let eig = SymmetricEigen::new(a.clone());
    let ct = eig.eigenvectors.transpose() * c;
    let vals: Vec<f64> = eig.eigenvalues.iter().map(|v| v.max(0.0)).collect();
    let g = |mu: f64| -> f64 {
        vals.iter()
            .zip(ct.iter())
            .map(|(l, c)| (mu * c / (l + mu)).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let mut lo = 0.0;
    let mut hi = 1.0;
    while g(hi) < lambda {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < lambda {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let mu = 0.5 * (lo + hi);
    let coef = DVector::from_iterator(vals.len(), vals.iter().zip(ct.iter()).map(|(l, c)| c / (l + mu)));
    &eig.eigenvectors * coef
}

/// Group Lasso by cyclic block coordinate descent with exact block updates.
pub fn exact_block_descent(x: &DMatrix<f64>, y: &DVector<f64>, part: &GroupPartition, lambda: &[f64]) -> Vec<f64> {
    let n = x.nrows() as f64;
    let k = x.ncols();
    let blocks: Vec<DMatrix<f64>> = part.groups().iter().map(|g| x.select_columns(g.iter())).collect();
    let grams: Vec<DMatrix<f64>> = blocks.iter().map(|b| b.transpose() * b / n).collect();
    let mut beta = DVector::<f64>::zeros(k);
    let mut resid = y.clone();
    let mut best = f64::INFINITY;
    let mut stall = 0;
    for _sweep in 0..200_000 {
        for (j, g) in part.groups().iter().enumerate() {
            let old = DVector::from_iterator(g.len(), g.iter().map(|&i| beta[i]));
            let partial = &resid + &blocks[j] * &old;
            let c = blocks[j].transpose() * &partial / n;
            let new = block_minimizer(&grams[j], &c, lambda[j]);
            resid = partial - &blocks[j] * &new;
            for (p, &i) in g.iter().enumerate() {
                beta[i] = new[p];
            }
        }
        let f = objective(x, y, part, lambda, beta.as_slice());
        if f < best - 1e-15 * best.abs().max(1.0) {
            best = f;
            stall = 0;
        } else {
            stall += 1;
            if stall >= 50 {
                break;
            }
        }
    }
    beta.as_slice().to_vec()
}

/// Group soft-threshold closed form for `XᵀX/N = φI`:
/// `β^j = (1 − λ_j/‖c^j‖)_+ c^j / φ` with `c = Xᵀy/N`.
pub fn orthonormal_closed_form(x: &DMatrix<f64>, y: &DVector<f64>, part: &GroupPartition, lambda: &[f64], phi: f64) -> Vec<f64> {
    let c = x.transpose() * y / x.nrows() as f64;
    let mut beta = vec![0.0; x.ncols()];
    for (j, g) in part.groups().iter().enumerate() {
        let norm = g.iter().map(|&i| c[i] * c[i]).sum::<f64>().sqrt();
        if norm > lambda[j] {
            let shrink = 1.0 - lambda[j] / norm;
            for &i in g {
                beta[i] = shrink * c[i] / phi;
            }
        }
    }
    beta
}

/// `√N Q √φ` for a random `N × K` matrix `Q` with orthonormal columns.
pub fn scaled_orthonormal(n: usize, k: usize, phi: f64, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let q = gaussian_matrix(n, k, rng).qr().q();
    q.columns(0, k).into_owned() * (n as f64 * phi).sqrt()
}
