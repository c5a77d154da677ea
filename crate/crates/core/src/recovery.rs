//! Sparsity-pattern estimation by thresholding group norms, and
//! confidence radii in the mixed `(2,p)` norms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::GroupPartition;
use crate::tuning::threshold_constants;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportEstimate {
    #[serde(rename = "J_hat")]
    pub j_hat: Vec<usize>,
    pub threshold: f64,
    pub group_norms: Vec<f64>,
}

fn check(lambda_max: f64, phi: f64) -> Result<()> {
    if !(phi > 0.0) {
        return Err(Error::Domain(format!("phi must be positive, got {phi}")));
    }
    if !(lambda_max >= 0.0) || !lambda_max.is_finite() {
        return Err(Error::Domain(format!("lambda_max must be finite and >= 0, got {lambda_max}")));
    }
    Ok(())
}

/// Sup-norm radius `c λ_max / φ`.
pub fn sup_threshold(lambda_max: f64, phi: f64, alpha: f64) -> Result<f64> {
    check(lambda_max, phi)?;
    let (c, _) = threshold_constants(alpha, f64::INFINITY)?;
    Ok(c * lambda_max / phi)
}

/// `Ĵ = {j : ‖β̂^j‖ > c λ_max / φ}`. Norms equal to the threshold are
/// excluded.
pub fn estimate_support(
    beta_hat: &[f64],
    partition: &GroupPartition,
    lambda_max: f64,
    phi: f64,
    alpha: f64,
) -> Result<SupportEstimate> {
    partition.check_len("estimate", beta_hat.len())?;
    let threshold = sup_threshold(lambda_max, phi, alpha)?;
    let group_norms = partition.group_norms(beta_hat);
    let j_hat = group_norms
        .iter()
        .enumerate()
        .filter(|(_, n)| **n > threshold)
        .map(|(j, _)| j)
        .collect();
    Ok(SupportEstimate {
        j_hat,
        threshold,
        group_norms,
    })
}

/// Every nonzero group of `β*` has norm strictly above `2 c λ_max / φ`.
pub fn min_signal_ok(
    beta_star: &[f64],
    partition: &GroupPartition,
    lambda_max: f64,
    phi: f64,
    alpha: f64,
) -> Result<bool> {
    partition.check_len("truth", beta_star.len())?;
    let bar = 2.0 * sup_threshold(lambda_max, phi, alpha)?;
    Ok(partition
        .group_norms(beta_star)
        .into_iter()
        .filter(|n| *n > 0.0)
        .all(|n| n > bar))
}

/// `(c₁/φ) λ_max (Σ_{j∈J} λ_j² / (λ_min λ_max))^{1/p}`; at `p = ∞` the
/// sum factor is 1.
pub fn pnorm_radius(lambda: &[f64], support: &[usize], alpha: f64, phi: f64, p: f64) -> Result<f64> {
    if lambda.is_empty() {
        return Err(Error::Domain("no penalty levels given".into()));
    }
    let lmax = lambda.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lmin = lambda.iter().cloned().fold(f64::INFINITY, f64::min);
    check(lmax, phi)?;
    let (_, c1) = threshold_constants(alpha, p)?;
    if let Some(&bad) = support.iter().find(|&&j| j >= lambda.len()) {
        return Err(Error::Domain(format!("support index {bad} out of range")));
    }
    if p.is_infinite() {
        return Ok(c1 * lmax / phi);
    }
    if !(lmin > 0.0) {
        return Err(Error::Domain("finite-p radius needs every penalty level positive".into()));
    }
    let sum: f64 = support.iter().map(|&j| lambda[j] * lambda[j]).sum::<f64>() / (lmin * lmax);
    Ok(c1 / phi * lmax * sum.powf(1.0 / p))
}
