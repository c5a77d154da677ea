//! Right-hand sides of the error bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tuning::dimension_power;

/// Inputs of the general oracle inequalities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleInputs {
    /// One penalty level per group.
    pub lambda: Vec<f64>,
    /// Support `J(β*)`.
    pub support: Vec<usize>,
    /// RE constant at sparsity `s`, cone factor 3.
    pub kappa: f64,
    /// RE constant at sparsity `2s`; the ℓ2 bound is skipped without it.
    pub kappa_2s: Option<f64>,
    pub phi_max: f64,
    pub s: usize,
    /// `‖β*‖_{2,1}`, needed only for the slow-rate bound.
    pub beta_star_l21: Option<f64>,
}

/// Upper bounds on the Group Lasso error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleRhs {
    /// `(1/N)‖XΔ‖² ≤ 4 ‖β*‖_{2,1} λ_max`, no RE condition needed.
    pub slow_rate: Option<f64>,
    /// `(1/N)‖XΔ‖² ≤ (16/κ²) Σ_J λ_j²`.
    pub prediction: f64,
    /// `‖Δ‖_{2,1} ≤ (16/κ²) Σ_J λ_j² / λ_min`.
    pub l21: f64,
    /// `M(β̂) ≤ (64 φ_max/κ²) Σ_J λ_j² / λ_min²`.
    pub sparsity: f64,
    /// `‖Δ‖ ≤ (4√10/κ_{2s}²) Σ_J λ_j² / (λ_min √s)`.
    pub l2: Option<f64>,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

/// `a / b` for bounds whose penalty ratios may degenerate: an all-zero
/// penalty gives the equal-levels limit, a zero `λ_min` with positive
/// levels elsewhere makes the bound vacuous.
fn ratio(num: f64, den: f64, limit: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num == 0.0 {
        limit
    } else {
        f64::INFINITY
    }
}

pub fn oracle_rhs(inp: &OracleInputs) -> Result<OracleRhs> {
    positive("kappa", inp.kappa)?;
    if let Some(k) = inp.kappa_2s {
        positive("kappa_2s", k)?;
    }
    if inp.lambda.is_empty() {
        return Err(Error::Domain("no penalty levels given".into()));
    }
    if let Some(&bad) = inp.support.iter().find(|&&j| j >= inp.lambda.len()) {
        return Err(Error::Domain(format!("support index {bad} out of range")));
    }
    if inp.s == 0 && inp.kappa_2s.is_some() && !inp.support.is_empty() {
        return Err(Error::Domain("s must be at least 1".into()));
    }
    let lmin = inp.lambda.iter().cloned().fold(f64::INFINITY, f64::min);
    let lmax = inp.lambda.iter().cloned().fold(0.0, f64::max);
    let k2 = inp.kappa * inp.kappa;
    let sum_sq: f64 = inp.support.iter().map(|&j| inp.lambda[j] * inp.lambda[j]).sum();
    let size = inp.support.len() as f64;
    let over_min = ratio(sum_sq, lmin, 0.0);
    let over_min_sq = ratio(sum_sq, lmin * lmin, size);
    Ok(OracleRhs {
        slow_rate: inp.beta_star_l21.map(|b| 4.0 * b * lmax),
        prediction: 16.0 / k2 * sum_sq,
        l21: 16.0 / k2 * over_min,
        sparsity: 64.0 * inp.phi_max / k2 * over_min_sq,
        l2: inp.kappa_2s.map(|k| {
            if inp.support.is_empty() {
                0.0
            } else {
                4.0 * 10f64.sqrt() / (k * k) * over_min / (inp.s as f64).sqrt()
            }
        }),
    })
}

/// Prediction bound allowing an approximating vector `β`:
/// `min over candidates of (96/κ²) Σ_{J(β)} λ_j² + (2/N)‖X(β − β*)‖²`,
/// with `κ` the RE constant for cone factor 7. Each candidate is given as
/// its support and its approximation error `(1/N)‖X(β − β*)‖²`.
pub fn bias_rhs(lambda: &[f64], kappa7: f64, candidates: &[(Vec<usize>, f64)]) -> Result<f64> {
    positive("kappa", kappa7)?;
    if candidates.is_empty() {
        return Err(Error::Domain("at least one candidate is required".into()));
    }
    let k2 = kappa7 * kappa7;
    candidates
        .iter()
        .map(|(support, approx)| {
            if let Some(&bad) = support.iter().find(|&&j| j >= lambda.len()) {
                return Err(Error::Domain(format!("support index {bad} out of range")));
            }
            let sum_sq: f64 = support.iter().map(|&j| lambda[j] * lambda[j]).sum();
            Ok(96.0 / k2 * sum_sq + 2.0 * approx)
        })
        .try_fold(f64::INFINITY, |acc, v| v.map(|v| acc.min(v)))
}

/// The multi-task bounds written in the multi-task normalization
/// (`κ_MT`, `φ_MT`, errors on `β` scaled by `1/√T`) with the common level
/// `λ = (2√2σ/√(nT)) R`, `R = (1 + A log M / T)^{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiTaskRhs {
    /// `(1/(nT))‖XΔ‖² ≤ (8√2σ/√(nT)) R ‖β*‖_{2,1}`.
    pub slow_rate: Option<f64>,
    /// `(1/(nT))‖XΔ‖² ≤ (128σ²/κ_MT²)(s/n) R²`.
    pub prediction: f64,
    /// `(1/√T)‖Δ‖_{2,1} ≤ (32√2σ/κ_MT²)(s/√n) R`.
    pub l21: f64,
    /// `M(β̂) ≤ 64 φ_MT s / κ_MT²`.
    pub sparsity: f64,
    /// `(1/√T)‖Δ‖ ≤ (16√5σ/κ_MT(2s)²) √(s/n) R`.
    pub l2: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiTaskInputs {
    pub sigma: f64,
    pub n: usize,
    pub tasks: usize,
    pub m: usize,
    pub a: f64,
    pub s: usize,
    pub kappa_mt: f64,
    pub kappa_mt_2s: Option<f64>,
    pub phi_mt: f64,
    pub beta_star_l21: Option<f64>,
}

pub fn multitask_rhs(inp: &MultiTaskInputs) -> Result<MultiTaskRhs> {
    positive("kappa_mt", inp.kappa_mt)?;
    if inp.n == 0 || inp.tasks == 0 || inp.m < 2 {
        return Err(Error::Domain("need n, T >= 1 and M >= 2".into()));
    }
    let (n, t, s) = (inp.n as f64, inp.tasks as f64, inp.s as f64);
    let r = (1.0 + inp.a * (inp.m as f64).ln() / t).sqrt();
    let k2 = inp.kappa_mt * inp.kappa_mt;
    Ok(MultiTaskRhs {
        slow_rate: inp
            .beta_star_l21
            .map(|b| 8.0 * 2f64.sqrt() * inp.sigma / (n * t).sqrt() * r * b),
        prediction: 128.0 * inp.sigma * inp.sigma / k2 * s / n * r * r,
        l21: 32.0 * 2f64.sqrt() * inp.sigma / k2 * s / n.sqrt() * r,
        sparsity: 64.0 * inp.phi_mt * s / k2,
        l2: inp
            .kappa_mt_2s
            .map(|k| 16.0 * 5f64.sqrt() * inp.sigma / (k * k) * (s / n).sqrt() * r),
    })
}

/// The multi-task bounds under fourth-moment noise, with
/// `λ = (x_* b/√(nT)) R'`, `R' = (1 + (log M)^{3/2+δ}/√T)^{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonGaussianRhs {
    /// `(1/(nT))‖XΔ‖² ≤ (4 x_* b/√(nT)) R' ‖β*‖_{2,1}`.
    pub slow_rate: Option<f64>,
    /// `(1/(nT))‖XΔ‖² ≤ (16 x_*² b²/κ_MT²)(s/n) R'²`.
    pub prediction: f64,
    /// `(1/√T)‖Δ‖_{2,1} ≤ (16 x_* b/κ_MT²)(s/√n) R'`.
    pub l21: f64,
    /// `M(β̂) ≤ 64 φ_MT s / κ_MT²`.
    pub sparsity: f64,
    /// `(1/√T)‖Δ‖_{2,∞} ≤ (c̃/√n) R'`, when a coherence margin is known.
    pub sup: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonGaussianInputs {
    pub x_star: f64,
    pub b: f64,
    pub n: usize,
    pub tasks: usize,
    pub m: usize,
    pub delta: f64,
    pub s: usize,
    pub kappa_mt: f64,
    pub phi_mt: f64,
    pub beta_star_l21: Option<f64>,
    /// Coherence margin for the sup-norm bound.
    pub alpha: Option<f64>,
}

pub fn nongaussian_rhs(inp: &NonGaussianInputs) -> Result<NonGaussianRhs> {
    positive("kappa_mt", inp.kappa_mt)?;
    if inp.n == 0 || inp.tasks == 0 || inp.m < 2 {
        return Err(Error::Domain("need n, T >= 1 and M >= 2".into()));
    }
    let (n, t, s) = (inp.n as f64, inp.tasks as f64, inp.s as f64);
    let r = (1.0 + dimension_power(inp.m, inp.delta) / t.sqrt()).sqrt();
    let xb = inp.x_star * inp.b;
    let k2 = inp.kappa_mt * inp.kappa_mt;
    let sup = match inp.alpha {
        Some(a) => Some(crate::tuning::nongaussian_sup_constant(a, inp.x_star, inp.b)? / n.sqrt() * r),
        None => None,
    };
    Ok(NonGaussianRhs {
        slow_rate: inp.beta_star_l21.map(|b| 4.0 * xb / (n * t).sqrt() * r * b),
        prediction: 16.0 * xb * xb / k2 * s / n * r * r,
        l21: 16.0 * xb / k2 * s / n.sqrt() * r,
        sparsity: 64.0 * inp.phi_mt * s / k2,
        sup,
    })
}

/// Lower bounds on the Lasso error with `r = Aσ√(φ log K / N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LassoLowerRhs {
    pub r: f64,
    /// `(1/N)‖XΔ‖² ≥ M′ A²σ²φ log K / (4 φ_max N)`.
    pub prediction: f64,
    /// `‖Δ‖ ≥ (Aσ/(2φ_max)) √(M′ φ log K / N)`.
    pub l2: f64,
}

pub fn lasso_lower_rhs(a: f64, sigma: f64, phi: f64, phi_max: f64, k: usize, n_obs: usize, m_prime: usize) -> Result<LassoLowerRhs> {
    if !(a > 2.0 * 2f64.sqrt()) {
        return Err(Error::Domain(format!("A must exceed 2√2, got {a}")));
    }
    positive("phi", phi)?;
    positive("phi_max", phi_max)?;
    if k < 2 || n_obs == 0 {
        return Err(Error::Domain("need K >= 2 and N >= 1".into()));
    }
    let (kf, nf, mp) = (k as f64, n_obs as f64, m_prime as f64);
    let base = phi * kf.ln() / nf;
    Ok(LassoLowerRhs {
        r: lasso_level(a, sigma, phi, k, n_obs),
        prediction: mp * a * a * sigma * sigma * base / (4.0 * phi_max),
        l2: a * sigma / (2.0 * phi_max) * (mp * base).sqrt(),
    })
}

/// `r = Aσ√(φ log K / N)`.
pub fn lasso_level(a: f64, sigma: f64, phi: f64, k: usize, n_obs: usize) -> f64 {
    a * sigma * (phi * (k as f64).ln() / n_obs as f64).sqrt()
}

/// Minimum `|Ψ_jj β*_j|` the Lasso support-size bound needs:
/// `(3/2 + 16 s′/κ′² · max_{j≠k}|Ψ_jk|) r`.
pub fn lasso_signal_threshold(r: f64, s_prime: usize, kappa_prime: Option<f64>, max_offdiag: f64) -> Result<f64> {
    if max_offdiag == 0.0 {
        return Ok(1.5 * r);
    }
    let k = kappa_prime.ok_or_else(|| Error::Domain("an RE constant is needed when Ψ has off-diagonal entries".into()))?;
    positive("kappa_prime", k)?;
    Ok((1.5 + 16.0 * s_prime as f64 / (k * k) * max_offdiag) * r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_levels() {
        let (lam, s) = (0.3, 3usize);
        let rhs = oracle_rhs(&OracleInputs {
            lambda: vec![lam; 7],
            support: (0..s).collect(),
            kappa: 1.0,
            kappa_2s: Some(1.0),
            phi_max: 2.0,
            s,
            beta_star_l21: Some(5.0),
        })
        .unwrap();
        assert!((rhs.prediction - 16.0 * s as f64 * lam * lam).abs() < 1e-14);
        assert!((rhs.l21 - 16.0 * s as f64 * lam).abs() < 1e-14);
        assert!((rhs.sparsity - 128.0 * s as f64).abs() < 1e-12);
        assert!((rhs.l2.unwrap() - 4.0 * 10f64.sqrt() * lam * (s as f64).sqrt()).abs() < 1e-14);
        assert!((rhs.slow_rate.unwrap() - 4.0 * 5.0 * lam).abs() < 1e-14);
        assert!(oracle_rhs(&OracleInputs { kappa: 0.0, ..base() }).is_err());
    }

    fn base() -> OracleInputs {
        OracleInputs {
            lambda: vec![1.0; 2],
            support: vec![0],
            kappa: 1.0,
            kappa_2s: None,
            phi_max: 1.0,
            s: 1,
            beta_star_l21: None,
        }
    }

    #[test]
    fn zero_penalty_limits() {
        let rhs = oracle_rhs(&OracleInputs {
            lambda: vec![0.0; 3],
            support: vec![0, 2],
            ..base()
        })
        .unwrap();
        assert_eq!(rhs.prediction, 0.0);
        assert_eq!(rhs.l21, 0.0);
        assert_eq!(rhs.sparsity, 128.0);
    }

    #[test]
    fn bias_picks_best_candidate() {
        let lam = [0.5, 0.5, 0.5];
        let v = bias_rhs(&lam, 1.0, &[(vec![0, 1], 0.0), (vec![0], 0.1), (vec![], 30.0)]).unwrap();
        assert!((v - (96.0 * 0.25 + 0.2)).abs() < 1e-12);
    }

    #[test]
    fn lasso_examples() {
        // Orthogonal multi-task design, M′ = sT.
        let (a, sigma, m, t, n, s) = (3.0, 1.2, 30usize, 4usize, 25usize, 2usize);
        let phi = 1.0 / t as f64;
        let rhs = lasso_lower_rhs(a, sigma, phi, phi, m * t, n * t, s * t).unwrap();
        let expect = a * a * sigma * sigma * s as f64 * ((m * t) as f64).ln() / (4.0 * n as f64);
        assert!((rhs.prediction - expect).abs() < 1e-12 * expect);
        let zero = lasso_lower_rhs(a, sigma, phi, phi, m * t, n * t, 0).unwrap();
        assert_eq!((zero.prediction, zero.l2), (0.0, 0.0));
        assert_eq!(lasso_signal_threshold(rhs.r, 4, None, 0.0).unwrap(), 1.5 * rhs.r);
        assert!(lasso_lower_rhs(2.8, 1.0, 1.0, 1.0, 4, 4, 1).is_err());
    }
}
