use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc_inv;

use crate::error::{invalid, Error, Result};

/// Minimum number of disclosed samples accepted by the estimator.
pub const MIN_SAMPLES: usize = 1000;

/// How the confidence multiplier z is derived from ε_PE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum QuantileConvention {
    /// z = erf⁻¹(1 − ε/2).
    #[default]
    ErfInverse,
    /// z = √2·erf⁻¹(1 − ε), the two-sided standard normal quantile.
    NormalQuantile,
}

impl QuantileConvention {
    pub fn z(self, epsilon: f64) -> f64 {
        match self {
            QuantileConvention::ErfInverse => erfc_inv(epsilon / 2.0),
            QuantileConvention::NormalQuantile => std::f64::consts::SQRT_2 * erfc_inv(epsilon),
        }
    }
}

/// Noise floor subtracted from σ² when converting to excess noise: the
/// vacuum constant of the data units and the trusted electronic noise (in
/// SNU, zero when unknown).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseReference {
    pub vacuum: f64,
    pub electronic: f64,
}

impl NoiseReference {
    pub fn homodyne() -> Self {
        Self { vacuum: 1.0, electronic: 0.0 }
    }

    pub fn floor(&self) -> f64 {
        self.vacuum * (1.0 + self.electronic)
    }
}

/// Linear-model fit Y = tX + Z with finite-size worst-case bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelEstimate {
    pub t_hat: f64,
    pub sigma2_hat: f64,
    pub xi_hat: f64,
    pub sd_t: f64,
    pub sd_sigma2: f64,
    pub t_min: f64,
    pub sigma2_max: f64,
    pub epsilon_pe: f64,
    pub m_disclosed: usize,
    pub quantile_convention: QuantileConvention,
    /// Confidence interval of ξ implied by the bounds on t and σ².
    pub xi_min: f64,
    pub xi_max: f64,
    /// ξ̂ below zero: noise under the vacuum reference.
    pub sub_vacuum: bool,
}

/// t_min = t̂ − z·sd_t.
pub fn t_lower_bound(t_hat: f64, sd_t: f64, z: f64) -> f64 {
    t_hat - z * sd_t
}

/// σ²_max = σ̂² + z·sd_σ².
pub fn sigma2_upper_bound(sigma2_hat: f64, sd_sigma2: f64, z: f64) -> f64 {
    sigma2_hat + z * sd_sigma2
}

/// Maximum-likelihood estimate of (t, σ²) from `m` disclosed pairs.
pub fn estimate_channel(
    x: &[f64],
    y: &[f64],
    epsilon_pe: f64,
    convention: QuantileConvention,
    reference: NoiseReference,
) -> Result<ChannelEstimate> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { expected: x.len(), actual: y.len() });
    }
    let m = x.len();
    if m < MIN_SAMPLES {
        return Err(invalid(format!("{m} disclosed samples, at least {MIN_SAMPLES} required")));
    }
    if !(epsilon_pe > 0.0 && epsilon_pe < 1.0) {
        return Err(invalid("epsilon_pe must lie in (0, 1)"));
    }
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    if sxx == 0.0 {
        return Err(Error::UnusableChannel("Σx² = 0".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let t_hat = sxy / sxx;
    if !(t_hat > 0.0) {
        return Err(Error::UnusableChannel(format!("t̂ = {t_hat} is not positive")));
    }
    let m_f = m as f64;
    let sigma2_hat = x.iter().zip(y).map(|(a, b)| (b - t_hat * a).powi(2)).sum::<f64>() / m_f;
    let sd_t = (sigma2_hat / sxx).sqrt();
    let sd_sigma2 = sigma2_hat * (2.0 / m_f).sqrt();
    let z = convention.z(epsilon_pe);
    let t_min = t_lower_bound(t_hat, sd_t, z);
    let sigma2_max = sigma2_upper_bound(sigma2_hat, sd_sigma2, z);
    let floor = reference.floor();
    let xi_hat = (sigma2_hat - floor) / (t_hat * t_hat);
    let t_max = t_hat + z * sd_t;
    let sigma2_min = sigma2_hat - z * sd_sigma2;
    let xi_min = (sigma2_min - floor) / (t_max * t_max);
    let xi_max = if t_min > 0.0 { (sigma2_max - floor) / (t_min * t_min) } else { f64::INFINITY };
    Ok(ChannelEstimate {
        t_hat,
        sigma2_hat,
        xi_hat,
        sd_t,
        sd_sigma2,
        t_min,
        sigma2_max,
        epsilon_pe,
        m_disclosed: m,
        quantile_convention: convention,
        xi_min,
        xi_max,
        sub_vacuum: xi_hat < 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles() {
        assert!((QuantileConvention::ErfInverse.z(0.01) - 1.984_872_4).abs() < 1e-6);
        assert!((QuantileConvention::NormalQuantile.z(0.05) - 1.959_964).abs() < 1e-6);
    }

    #[test]
    fn bounds_are_exact() {
        assert_eq!(t_lower_bound(0.5, 0.01, 2.0), 0.48);
        assert_eq!(sigma2_upper_bound(1.05, 0.01, 2.0), 1.07);
    }
}
