use serde::{Deserialize, Serialize};

use super::estimator::ChannelEstimate;
use super::keyrate::{holevo_bound, mutual_information, Direction, LinkModel};
use crate::channel::DetectorModel;
use crate::error::{invalid, Result};

/// How detector noise enters the security analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NoiseTrust {
    /// Detector inefficiency and electronic noise are attributed to Eve.
    Untrusted,
    /// Detector imperfections are calibrated and inaccessible to Eve; ν_el
    /// is the calibrated electronic noise in SNU.
    Trusted { nu_el: f64 },
}

/// Finite-size accounting inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteSize {
    /// Fraction of the raw data disclosed for parameter estimation.
    pub disclosed_fraction: f64,
    /// Symbols in the key block.
    pub n_key: usize,
    pub epsilon_h: f64,
    /// Subtract the hashing penalty (2/n)·log₂(1/ε_h) from the rate here
    /// instead of at key-length time.
    pub penalty_in_rate: bool,
}

/// Security analysis outcome, in bits per transmitted symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecurityResult {
    pub mutual_info_bits_per_symbol: f64,
    pub holevo_bound_bits: f64,
    pub skr_asymptotic: f64,
    pub skr_finite: f64,
    pub reconciliation_beta: f64,
    pub abort: bool,
    pub reconciliation_direction: Direction,
    /// Worst-case transmittance and excess noise handed to the Holevo bound.
    pub transmittance_worst: f64,
    pub xi_worst: f64,
}

/// Protocol decision after the security analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Continue,
    Abort,
}

/// Secret-key rate from the worst-case estimates. I_AB uses the point
/// estimates; Eve's information uses T = t_min² and ξ derived from
/// σ²_max, both in the units of `est` (vacuum constant of `det.kind`).
pub fn compute_skr(
    est: &ChannelEstimate,
    v_a: f64,
    det: &DetectorModel,
    beta: f64,
    direction: Direction,
    trust: NoiseTrust,
    finite: &FiniteSize,
) -> Result<SecurityResult> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(invalid("beta must lie in [0, 1]"));
    }
    if !(0.0..1.0).contains(&finite.disclosed_fraction) {
        return Err(invalid("disclosed fraction must lie in [0, 1)"));
    }
    let vac = det.kind.vacuum_constant();
    let snr = if est.sigma2_hat > 0.0 { est.t_hat * est.t_hat * v_a / est.sigma2_hat } else { f64::INFINITY };
    let i_ab = mutual_information(snr, det.kind);
    let t2 = est.t_min.max(0.0).powi(2);
    // Trust only applies to reverse reconciliation.
    let trust = if direction == Direction::Direct { NoiseTrust::Untrusted } else { trust };
    let (link, t_worst, xi_worst) = if t2 <= 0.0 {
        (None, 0.0, f64::INFINITY)
    } else {
        match trust {
            NoiseTrust::Untrusted => {
                let t = t2.min(1.0);
                let xi = ((est.sigma2_max - vac) / t2).max(0.0);
                (Some(LinkModel::ideal(t, xi, v_a, det.kind, direction)), t, xi)
            }
            NoiseTrust::Trusted { nu_el } => {
                let t = (t2 / det.efficiency_eta).min(1.0);
                let xi = ((est.sigma2_max - vac * (1.0 + nu_el)) / t2).max(0.0);
                let link = LinkModel {
                    transmittance: t,
                    xi,
                    v_a,
                    kind: det.kind,
                    direction,
                    eta: det.efficiency_eta,
                    nu_el,
                    trusted_detector: true,
                };
                (Some(link), t, xi)
            }
        }
    };
    let (chi, skr_asym) = match link {
        Some(l) => {
            let chi = holevo_bound(&l)?;
            (chi, beta * i_ab - chi)
        }
        // No usable transmittance: Eve may hold everything.
        None => (f64::INFINITY, f64::NEG_INFINITY),
    };
    let kept = if skr_asym > 0.0 { (1.0 - finite.disclosed_fraction) * skr_asym } else { skr_asym };
    let penalty = if finite.penalty_in_rate && finite.n_key > 0 {
        2.0 * (1.0 / finite.epsilon_h).log2() / finite.n_key as f64
    } else {
        0.0
    };
    let skr_finite = kept - penalty;
    Ok(SecurityResult {
        mutual_info_bits_per_symbol: i_ab,
        holevo_bound_bits: chi,
        skr_asymptotic: skr_asym,
        skr_finite,
        reconciliation_beta: beta,
        abort: !(skr_finite > 0.0),
        reconciliation_direction: direction,
        transmittance_worst: t_worst,
        xi_worst,
    })
}

/// Abort iff the finite-size rate is not strictly positive.
pub fn decide_abort(sec: &SecurityResult) -> Decision {
    if sec.skr_finite > 0.0 {
        Decision::Continue
    } else {
        Decision::Abort
    }
}
