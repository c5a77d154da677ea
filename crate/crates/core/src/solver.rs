//! Group Lasso and Lasso by accelerated proximal gradient.
//!
//! The estimator minimizes `(1/N)‖Xβ − y‖² + 2 Σ_j λ_j ‖β^j‖`. Iterates
//! take a fixed step `1/L` with `L = 2 φ_max`, use Nesterov momentum with
//! function-value restart, and stop once the KKT residual of the iterate is
//! below tolerance.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{max_eigenvalue, GroupPartition, Problem};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub max_iter: usize,
    /// KKT tolerance; `None` means `1e-8 * max(1, λ_max)`.
    pub tol: Option<f64>,
    pub accelerate: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iter: 50_000,
            tol: None,
            accelerate: true,
        }
    }
}

impl SolveOptions {
    pub fn tolerance(&self, lambda_max: f64) -> f64 {
        self.tol.unwrap_or(1e-8 * lambda_max.max(1.0))
    }

    fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::Domain("max_iter must be at least 1".into()));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(Error::Domain(format!("tolerance must be positive, got {t}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub beta: Vec<f64>,
    pub kkt_residual: f64,
    pub iterations: usize,
    pub objective: f64,
    pub active_groups: Vec<usize>,
    pub converged: bool,
    /// Objective value at each momentum restart.
    #[serde(skip)]
    pub restart_objectives: Vec<f64>,
}

/// The least-squares term written through normal equations:
/// `(1/N)‖Xβ − y‖² = βᵀΨβ − 2βᵀc + d` with `Ψ = XᵀX/N`, `c = Xᵀy/N`,
/// `d = yᵀy/N`.
#[derive(Debug, Clone)]
pub struct QuadraticLoss<'a> {
    pub psi: &'a DMatrix<f64>,
    pub xty: DVector<f64>,
    pub yty: f64,
    /// Largest eigenvalue of `psi`.
    pub phi_max: f64,
}

impl QuadraticLoss<'_> {
    fn value(&self, beta: &DVector<f64>, psi_beta: &DVector<f64>) -> f64 {
        beta.dot(psi_beta) - 2.0 * beta.dot(&self.xty) + self.yty
    }
}

/// Block soft-thresholding: `out^j = max(0, 1 − t_j/‖z^j‖) z^j`.
pub fn group_prox(z: &[f64], partition: &GroupPartition, thresholds: &[f64]) -> Result<Vec<f64>> {
    partition.check_len("z", z.len())?;
    if thresholds.len() != partition.len() {
        return Err(Error::Dimension(format!(
            "{} thresholds for {} groups",
            thresholds.len(),
            partition.len()
        )));
    }
    let mut out = z.to_vec();
    prox_in_place(&mut out, partition, thresholds);
    Ok(out)
}

fn prox_in_place(v: &mut [f64], partition: &GroupPartition, thresholds: &[f64]) {
    for (j, g) in partition.groups().iter().enumerate() {
        if let [i] = g.as_slice() {
            v[*i] = soft_threshold(v[*i], thresholds[j]);
            continue;
        }
        let norm = partition.block_norm(v, j);
        let scale = if norm > thresholds[j] {
            1.0 - thresholds[j] / norm
        } else {
            0.0
        };
        for &i in g {
            v[i] *= scale;
        }
    }
}

/// Scalar soft-thresholding `sign(z) max(0, |z| − t)`.
pub fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// `(1/N)‖Xβ − y‖² + 2 Σ_j λ_j ‖β^j‖`, evaluated directly from the data.
pub fn objective(problem: &Problem, beta: &[f64]) -> Result<f64> {
    let part = problem.partition();
    part.check_len("beta", beta.len())?;
    let d = &problem.data;
    let r = &d.x * DVector::from_column_slice(beta) - &d.y;
    let penalty: f64 = (0..part.len())
        .map(|j| problem.lambda[j] * part.block_norm(beta, j))
        .sum();
    Ok(r.norm_squared() / d.n_obs() as f64 + 2.0 * penalty)
}

/// Largest violation of the optimality conditions at `beta`, with
/// `g = Xᵀ(y − Xβ)/N`: `‖g^j − λ_j β^j/‖β^j‖‖` on nonzero groups and
/// `max(0, ‖g^j‖ − λ_j)` on zero groups.
pub fn kkt_residual(problem: &Problem, beta: &[f64]) -> Result<f64> {
    let part = problem.partition();
    part.check_len("beta", beta.len())?;
    let d = &problem.data;
    let r = &d.y - &d.x * DVector::from_column_slice(beta);
    let g = d.x.tr_mul(&r) / d.n_obs() as f64;
    Ok(kkt_from_gradient(g.as_slice(), beta, part, &problem.lambda))
}

fn kkt_from_gradient(g: &[f64], beta: &[f64], part: &GroupPartition, lambda: &[f64]) -> f64 {
    let mut worst = 0.0_f64;
    for (j, grp) in part.groups().iter().enumerate() {
        let bn = part.block_norm(beta, j);
        let v = if bn > 0.0 {
            grp.iter()
                .map(|&i| {
                    let d = g[i] - lambda[j] * beta[i] / bn;
                    d * d
                })
                .sum::<f64>()
                .sqrt()
        } else {
            (part.block_norm(g, j) - lambda[j]).max(0.0)
        };
        worst = worst.max(v);
    }
    worst
}

/// Solves the Group Lasso problem `problem`.
pub fn solve_group_lasso(problem: &Problem, opts: &SolveOptions) -> Result<SolveResult> {
    let d = &problem.data;
    check_finite(d.x.as_slice(), "design")?;
    check_finite(d.y.as_slice(), "response")?;
    let n = d.n_obs() as f64;
    let psi = d.x.tr_mul(&d.x) / n;
    let loss = QuadraticLoss {
        phi_max: max_eigenvalue(&psi),
        psi: &psi,
        xty: d.x.tr_mul(&d.y) / n,
        yty: d.y.norm_squared() / n,
    };
    let mut res = solve_quadratic(&loss, problem.partition(), &problem.lambda, opts)?;
    res.objective = objective(problem, &res.beta)?;
    Ok(res)
}

/// Lasso `min (1/N)‖Xβ − y‖² + 2r‖β‖₁`: the singleton-group case.
pub fn solve_lasso(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    r: f64,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("Lasso penalty must be >= 0, got {r}")));
    }
    let part = GroupPartition::singletons(x.ncols());
    let data = crate::model::RegressionData::new(x.clone(), y.clone(), part)?;
    let problem = Problem::new(data, vec![r; x.ncols()])?;
    solve_group_lasso(&problem, opts)
}

/// Solves the problem given in normal-equation form. This is the entry
/// point for repeated solves that share one Gram matrix.
pub fn solve_quadratic(
    loss: &QuadraticLoss<'_>,
    partition: &GroupPartition,
    lambda: &[f64],
    opts: &SolveOptions,
) -> Result<SolveResult> {
    opts.validate()?;
    let k = partition.dim();
    if loss.psi.shape() != (k, k) || loss.xty.len() != k {
        return Err(Error::Dimension(format!(
            "Gram is {}x{} and Xᵀy has length {}, partition covers {k}",
            loss.psi.nrows(),
            loss.psi.ncols(),
            loss.xty.len()
        )));
    }
    if lambda.len() != partition.len() {
        return Err(Error::Dimension(format!(
            "{} penalty levels for {} groups",
            lambda.len(),
            partition.len()
        )));
    }
    check_finite(loss.xty.as_slice(), "Xᵀy")?;
    if !loss.yty.is_finite() || !loss.phi_max.is_finite() {
        return Err(Error::NonFinite("response norm or spectral bound".into()));
    }
    let lambda_max = lambda.iter().cloned().fold(0.0, f64::max);
    let tol = opts.tolerance(lambda_max);
    let penalty = |b: &DVector<f64>| -> f64 {
        2.0 * (0..partition.len())
            .map(|j| lambda[j] * partition.block_norm(b.as_slice(), j))
            .sum::<f64>()
    };

    let mut x = DVector::zeros(k);
    let mut psi_x = DVector::zeros(k);
    let kkt_at = |b: &DVector<f64>, psi_b: &DVector<f64>| -> f64 {
        let g = &loss.xty - psi_b;
        kkt_from_gradient(g.as_slice(), b.as_slice(), partition, lambda)
    };

    let mut f_x = loss.yty;
    let mut kkt = kkt_at(&x, &psi_x);
    let mut restarts = Vec::new();
    // Ψ = 0: the loss is constant and zero is optimal.
    if kkt <= tol || loss.phi_max <= 0.0 {
        return Ok(SolveResult {
            beta: x.as_slice().to_vec(),
            kkt_residual: kkt,
            iterations: 0,
            objective: f_x,
            active_groups: Vec::new(),
            converged: kkt <= tol,
            restart_objectives: restarts,
        });
    }

    let lip = 2.0 * loss.phi_max * (1.0 + 1e-10);
    let step = 1.0 / lip;
    let thresholds: Vec<f64> = lambda.iter().map(|l| 2.0 * l * step).collect();

    let mut y = x.clone();
    let mut psi_y = psi_x.clone();
    let mut momentum = 1.0_f64;
    let mut just_restarted = false;
    let mut iterations = 0;
    let mut z = DVector::zeros(k);
    let mut psi_new = DVector::zeros(k);

    for it in 1..=opts.max_iter {
        iterations = it;
        // z = y − (2/L)(Ψy − c)
        z.copy_from(&y);
        z.axpy(-2.0 * step, &psi_y, 1.0);
        z.axpy(2.0 * step, &loss.xty, 1.0);
        prox_in_place(z.as_mut_slice(), partition, &thresholds);
        psi_new.gemv(1.0, loss.psi, &z, 0.0);
        let f_new = loss.value(&z, &psi_new) + penalty(&z);
        if !f_new.is_finite() {
            return Err(Error::NonFinite(format!("objective at iteration {it}")));
        }

        if opts.accelerate && f_new > f_x && !just_restarted {
            restarts.push(f_x);
            momentum = 1.0;
            y.copy_from(&x);
            psi_y.copy_from(&psi_x);
            just_restarted = true;
            continue;
        }
        just_restarted = false;

        if opts.accelerate {
            let next = 0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt());
            let w = (momentum - 1.0) / next;
            momentum = next;
            // y = z + w (z − x)
            y.copy_from(&z);
            y.axpy(-w, &x, 1.0 + w);
            psi_y.copy_from(&psi_new);
            psi_y.axpy(-w, &psi_x, 1.0 + w);
        } else {
            y.copy_from(&z);
            psi_y.copy_from(&psi_new);
        }
        std::mem::swap(&mut x, &mut z);
        std::mem::swap(&mut psi_x, &mut psi_new);
        f_x = f_new;

        kkt = kkt_at(&x, &psi_x);
        if kkt <= tol {
            break;
        }
    }

    let active = partition.support(x.as_slice());
    Ok(SolveResult {
        beta: x.as_slice().to_vec(),
        kkt_residual: kkt,
        iterations,
        objective: f_x,
        active_groups: active,
        converged: kkt <= tol,
        restart_objectives: restarts,
    })
}

fn check_finite(v: &[f64], what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RegressionData;
    use proptest::prelude::*;

    fn problem(x: DMatrix<f64>, y: Vec<f64>, part: GroupPartition, lambda: Vec<f64>) -> Problem {
        RegressionData::new(x, DVector::from_vec(y), part)
            .unwrap()
            .with_lambda(lambda)
            .unwrap()
    }

    #[test]
    fn prox_examples() {
        let part = GroupPartition::contiguous(&[2]).unwrap();
        let out = group_prox(&[3.0, 4.0], &part, &[2.5]).unwrap();
        assert!((out[0] - 1.5).abs() < 1e-15 && (out[1] - 2.0).abs() < 1e-15);
        // Fixed point of u = argmin ½‖u − z‖² + t‖u‖: z − u = t u/‖u‖.
        let u = nalgebra::Vector2::new(out[0], out[1]);
        let resid = nalgebra::Vector2::new(3.0, 4.0) - u - 2.5 * u / u.norm();
        assert!(resid.norm() < 1e-14);
        assert_eq!(group_prox(&[3.0, 4.0], &part, &[5.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(group_prox(&[0.0, 0.0], &part, &[1.0]).unwrap(), vec![0.0, 0.0]);
        assert!(group_prox(&[0.0, 0.0], &part, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn kkt_at_zero() {
        // X = √2 I on two singleton groups, y = (1, 2): Xᵀy/N = (1/√2, √2).
        let x = DMatrix::<f64>::identity(2, 2) * 2f64.sqrt();
        let part = GroupPartition::singletons(2);
        let z1 = 1.0 / 2f64.sqrt();
        let z2 = 2f64.sqrt();
        let p = problem(x.clone(), vec![1.0, 2.0], part.clone(), vec![z1, z2]);
        assert!(kkt_residual(&p, &[0.0, 0.0]).unwrap() < 1e-15);
        let p = problem(x, vec![1.0, 2.0], part, vec![z1, z2 - 0.3]);
        assert!((kkt_residual(&p, &[0.0, 0.0]).unwrap() - 0.3).abs() < 1e-14);
    }

    #[test]
    fn zero_solution_under_heavy_penalty() {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 0.5, -0.3, 2.0, 0.7, 0.1]);
        let p = problem(x, vec![1.0, -1.0, 0.5], GroupPartition::contiguous(&[2]).unwrap(), vec![10.0]);
        let r = solve_group_lasso(&p, &SolveOptions::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 0);
        assert!(r.beta.iter().all(|b| *b == 0.0));
        assert!(r.active_groups.is_empty());
    }

    #[test]
    fn zero_design_returns_zero() {
        let p = problem(DMatrix::zeros(3, 2), vec![1.0, 2.0, 3.0], GroupPartition::singletons(2), vec![0.0, 0.0]);
        let r = solve_group_lasso(&p, &SolveOptions::default()).unwrap();
        assert_eq!(r.beta, vec![0.0, 0.0]);
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let x = DMatrix::from_row_slice(2, 1, &[1.0, f64::NAN]);
        let p = problem(x, vec![1.0, 2.0], GroupPartition::singletons(1), vec![0.1]);
        assert!(matches!(solve_group_lasso(&p, &SolveOptions::default()), Err(Error::NonFinite(_))));
    }

    #[test]
    fn ols_when_unpenalized() {
        let x = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, -0.1, 0.2, 1.5, 0.4, -0.3, 0.1, 1.8]);
        let y = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let ols = x.clone().lu().solve(&y).unwrap();
        let p = problem(x.clone(), y.as_slice().to_vec(), GroupPartition::contiguous(&[2, 1]).unwrap(), vec![0.0, 0.0]);
        let r = solve_group_lasso(&p, &SolveOptions::default()).unwrap();
        assert!(r.converged);
        for i in 0..3 {
            assert!((r.beta[i] - ols[i]).abs() <= 1e-6 * ols[i].abs().max(1e-3));
        }
        let rl = solve_lasso(&x, &y, 0.0, &SolveOptions::default()).unwrap();
        for i in 0..3 {
            assert!((rl.beta[i] - ols[i]).abs() <= 1e-6 * ols[i].abs().max(1e-3));
        }
    }

    #[test]
    fn lasso_soft_threshold_closed_form() {
        // X = √N Q with orthonormal Q, so XᵀX/N = I.
        let n = 6;
        let a = DMatrix::from_fn(n, 3, |i, j| ((i * 5 + j * 3) % 7) as f64 - 2.9 + 0.1 * j as f64);
        let q = a.qr().q();
        let x = q * (n as f64).sqrt();
        let y = DVector::from_fn(n, |i, _| (i as f64 * 0.7).sin() * 2.0);
        let r = 0.15;
        let z = x.tr_mul(&y) / n as f64;
        let res = solve_lasso(&x, &y, r, &SolveOptions::default()).unwrap();
        for j in 0..3 {
            assert!((res.beta[j] - soft_threshold(z[j], r)).abs() < 1e-10);
        }
        let big = z.amax();
        let res0 = solve_lasso(&x, &y, big, &SolveOptions::default()).unwrap();
        assert!(res0.beta.iter().all(|b| *b == 0.0));
    }

    #[test]
    fn restart_objectives_do_not_increase() {
        let x = DMatrix::from_fn(12, 6, |i, j| (((i * 13 + j * 7) % 11) as f64 - 5.0) / 3.0 + if i == j { 2.0 } else { 0.0 });
        let y: Vec<f64> = (0..12).map(|i| (i as f64).cos()).collect();
        let p = problem(x, y, GroupPartition::contiguous(&[2, 2, 1, 1]).unwrap(), vec![0.02, 0.05, 0.01, 0.03]);
        let r = solve_group_lasso(&p, &SolveOptions::default()).unwrap();
        assert!(r.converged);
        for w in r.restart_objectives.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn serialized_fields() {
        let r = SolveResult {
            beta: vec![1.0, 0.0],
            kkt_residual: 1e-9,
            iterations: 4,
            objective: 0.5,
            active_groups: vec![0],
            converged: true,
            restart_objectives: vec![1.0],
        };
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, ["active_groups", "beta", "converged", "iterations", "kkt_residual", "objective"]);
    }

    proptest! {
        #[test]
        fn prox_is_non_expansive(
            a in prop::collection::vec(-5.0f64..5.0, 5),
            b in prop::collection::vec(-5.0f64..5.0, 5),
            t in prop::collection::vec(0.0f64..3.0, 3),
        ) {
            let part = GroupPartition::contiguous(&[2, 1, 2]).unwrap();
            let pa = group_prox(&a, &part, &t).unwrap();
            let pb = group_prox(&b, &part, &t).unwrap();
            let d_out: f64 = pa.iter().zip(&pb).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            let d_in: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            prop_assert!(d_out <= d_in + 1e-12);
        }
    }
}
