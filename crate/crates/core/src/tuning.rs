//! Closed-form penalty levels and the constants that accompany them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::GramSummary;

/// Which noise model a penalty level was derived for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Gaussian,
    Multitask,
    FourthMoment,
}

/// A penalty level together with the probability of the event on which the
/// accompanying bounds hold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tuning {
    pub lambda: Vec<f64>,
    pub probability: f64,
    pub regime: Regime,
    /// Set when `probability <= 0`, i.e. the guarantee is vacuous.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub vacuous: bool,
}

fn require_groups(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::Domain(format!("at least two groups are required, got {m}")));
    }
    Ok(())
}

/// Smallest per-group levels admissible in the Gaussian setting:
/// `λ_j = (2σ/√N) √(tr Ψ_j + 2|||Ψ_j|||(2q log M + √(K_j q log M)))`.
/// The associated event has probability at least `1 − 2M^{1−q}`.
pub fn lambda_groups(
    sigma: f64,
    n_obs: usize,
    q: f64,
    gram: &GramSummary,
    group_sizes: &[usize],
) -> Result<Tuning> {
    let m = group_sizes.len();
    require_groups(m)?;
    if !(q > 1.0) {
        return Err(Error::Domain(format!("confidence exponent q must exceed 1, got {q}")));
    }
    if !(sigma >= 0.0) {
        return Err(Error::Domain(format!("sigma must be >= 0, got {sigma}")));
    }
    if n_obs == 0 {
        return Err(Error::Domain("N must be at least 1".into()));
    }
    if gram.group_trace.len() != m {
        return Err(Error::Dimension(format!(
            "Gram summary has {} groups, sizes list has {m}",
            gram.group_trace.len()
        )));
    }
    let log_m = (m as f64).ln();
    let scale = 2.0 * sigma / (n_obs as f64).sqrt();
    let lambda = (0..m)
        .map(|j| {
            let kj = group_sizes[j] as f64;
            let inner = gram.group_trace[j]
                + 2.0 * gram.group_spectral[j] * (2.0 * q * log_m + (kj * q * log_m).sqrt());
            scale * inner.max(0.0).sqrt()
        })
        .collect();
    Ok(Tuning {
        lambda,
        probability: 1.0 - 2.0 * (m as f64).powf(1.0 - q),
        regime: Regime::Gaussian,
        vacuous: false,
    })
}

/// Common multi-task level `λ = (2√2σ/√(nT)) (1 + A log M / T)^{1/2}` with
/// success probability `1 − 2M^{1−2A/5}`.
pub fn lambda_multitask(sigma: f64, n: usize, tasks: usize, m: usize, a: f64) -> Result<(f64, f64)> {
    require_groups(m)?;
    if !(a > 2.5) {
        return Err(Error::Domain(format!("A must exceed 5/2, got {a}")));
    }
    if n == 0 || tasks == 0 {
        return Err(Error::Domain("n and T must be at least 1".into()));
    }
    let (nf, tf, mf) = (n as f64, tasks as f64, m as f64);
    let lambda = 2.0 * 2f64.sqrt() * sigma / (nf * tf).sqrt() * (1.0 + a * mf.ln() / tf).sqrt();
    Ok((lambda, 1.0 - 2.0 * mf.powf(1.0 - 2.0 * a / 5.0)))
}

/// Level for noise with bounded fourth moment `E W⁴ ≤ b⁴`:
/// `λ = (x_* b/√(nT)) (1 + (log M)^{3/2+δ}/√T)^{1/2}`.
///
/// The returned probability may be negative for small `M`; the tuning is
/// then flagged `vacuous` rather than rejected.
pub fn lambda_nongaussian(
    x_star: f64,
    b: f64,
    n: usize,
    tasks: usize,
    m: usize,
    delta: f64,
) -> Result<Tuning> {
    require_groups(m)?;
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("delta must be positive, got {delta}")));
    }
    if n == 0 || tasks == 0 {
        return Err(Error::Domain("n and T must be at least 1".into()));
    }
    let (nf, tf) = (n as f64, tasks as f64);
    let dim_term = dimension_power(m, delta);
    let lambda = x_star * b / (nf * tf).sqrt() * (1.0 + dim_term / tf.sqrt()).sqrt();
    let probability = nongaussian_probability(m, delta);
    Ok(Tuning {
        lambda: vec![lambda; m],
        probability,
        regime: Regime::FourthMoment,
        vacuous: probability <= 0.0,
    })
}

/// `(log M)^{3/2+δ}`.
pub fn dimension_power(m: usize, delta: f64) -> f64 {
    (m as f64).ln().powf(1.5 + delta)
}

/// `1 − 4√(log 2M) [(8 log 12M)² + 1]^{1/2} / (log M)^{3/2+δ}`.
pub fn nongaussian_probability(m: usize, delta: f64) -> f64 {
    let mf = m as f64;
    let num = 4.0 * (2.0 * mf).ln().sqrt() * ((8.0 * (12.0 * mf).ln()).powi(2) + 1.0).sqrt();
    1.0 - num / dimension_power(m, delta)
}

/// Thresholding constants `c = 3/2 + 16/(7(α−1))` and
/// `c₁ = (16α/(α−1))^{1/p} c^{1−1/p}`, with `x^{1/∞} = 1`.
/// `α = ∞` is accepted and gives the limits `c = 3/2`, `16α/(α−1) = 16`.
pub fn threshold_constants(alpha: f64, p: f64) -> Result<(f64, f64)> {
    if !(alpha > 1.0) {
        return Err(Error::Domain(format!("coherence margin must exceed 1, got {alpha}")));
    }
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("p must be in [1, inf], got {p}")));
    }
    let c = sup_norm_constant(alpha);
    let head = 16.0 / (1.0 - 1.0 / alpha);
    let inv_p = if p.is_infinite() { 0.0 } else { 1.0 / p };
    Ok((c, head.powf(inv_p) * c.powf(1.0 - inv_p)))
}

pub(crate) fn sup_norm_constant(alpha: f64) -> f64 {
    1.5 + 16.0 / (7.0 * (alpha - 1.0))
}

/// `c̃ = (3/2 + 8/(7(α−1))) x_* b`, the sup-norm constant under
/// fourth-moment noise.
pub fn nongaussian_sup_constant(alpha: f64, x_star: f64, b: f64) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(Error::Domain(format!("coherence margin must exceed 1, got {alpha}")));
    }
    Ok((1.5 + 8.0 / (7.0 * (alpha - 1.0))) * x_star * b)
}

/// `c(m) = min{c > 0 : e^{m−1} − 1 ≤ (c − 2)M} = 2 + (e^{m−1} − 1)/M`.
pub fn moment_constant(m: f64, big_m: usize) -> Result<f64> {
    if !(m >= 1.0) {
        return Err(Error::Domain(format!("moment order must be >= 1, got {m}")));
    }
    if big_m == 0 {
        return Err(Error::Domain("M must be at least 1".into()));
    }
    Ok(2.0 + (m - 1.0).exp_m1() / big_m as f64)
}
