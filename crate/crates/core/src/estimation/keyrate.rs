use serde::{Deserialize, Serialize};

use crate::channel::DetectionKind;
use crate::error::{Error, Result};

/// Reconciliation direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Direction {
    /// Direct: Alice's data is the reference.
    #[serde(rename = "DR")]
    Direct,
    /// Reverse: Bob's data is the reference.
    #[default]
    #[serde(rename = "RR")]
    Reverse,
}

/// Gaussian entropy of a mode with symplectic eigenvalue `x`.
pub fn g_entropy(x: f64) -> f64 {
    if x <= 1.0 + 1e-15 {
        return 0.0;
    }
    let a = (x + 1.0) / 2.0;
    let b = (x - 1.0) / 2.0;
    a * a.log2() - b * b.log2()
}

/// Symplectic eigenvalues of a two-mode matrix from its invariant Δ and
/// √det: ν² = (Δ ± √(Δ² − 4·det))/2. The smaller one is computed as
/// √det/ν₁ to avoid cancellation.
fn two_mode_eigenvalues(delta: f64, sqrt_det: f64) -> (f64, f64) {
    let s = (delta * delta - 4.0 * sqrt_det * sqrt_det).max(0.0).sqrt();
    let n1 = ((delta + s) / 2.0).sqrt();
    (n1, sqrt_det / n1)
}

fn check_physical(values: &[f64]) -> Result<()> {
    for &v in values {
        if !(v >= 1.0 - 1e-9) {
            return Err(Error::NonPhysical(v));
        }
    }
    Ok(())
}

/// Link model for the entanglement-based Gaussian analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkModel {
    pub transmittance: f64,
    /// Channel excess noise, input-referred, SNU.
    pub xi: f64,
    pub v_a: f64,
    pub kind: DetectionKind,
    pub direction: Direction,
    pub eta: f64,
    pub nu_el: f64,
    /// Whether detector inefficiency and electronic noise are trusted
    /// (inaccessible to Eve). Untrusted imperfections are folded into the
    /// channel.
    pub trusted_detector: bool,
}

impl LinkModel {
    /// Ideal-detector link.
    pub fn ideal(transmittance: f64, xi: f64, v_a: f64, kind: DetectionKind, direction: Direction) -> Self {
        Self { transmittance, xi, v_a, kind, direction, eta: 1.0, nu_el: 0.0, trusted_detector: false }
    }

    /// Per-quadrature signal-to-noise ratio at Bob.
    pub fn snr(&self) -> f64 {
        let vac = self.kind.vacuum_constant();
        let t = self.eta * self.transmittance;
        t * self.v_a / (vac * (1.0 + self.nu_el) + t * self.xi)
    }

    /// Equivalent ideal-detector link with all detector noise attributed to
    /// the channel.
    pub fn folded(&self) -> Self {
        let t = self.eta * self.transmittance;
        let vac = self.kind.vacuum_constant();
        let xi = if t > 0.0 { self.xi + vac * self.nu_el / t } else { self.xi };
        Self { transmittance: t, xi, eta: 1.0, nu_el: 0.0, trusted_detector: false, ..*self }
    }
}

/// Key-rate components in bits per symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyRate {
    pub mutual_info: f64,
    pub holevo: f64,
    pub skr: f64,
}

/// I_AB = (κ/2)·log₂(1 + SNR), κ = 1 homodyne, 2 heterodyne.
pub fn mutual_information(snr: f64, kind: DetectionKind) -> f64 {
    let per_quad = 0.5 * (1.0 + snr.max(0.0)).log2();
    match kind {
        DetectionKind::Homodyne => per_quad,
        DetectionKind::Heterodyne => 2.0 * per_quad,
    }
}

/// Holevo bound on Eve's information under collective attacks.
pub fn holevo_bound(link: &LinkModel) -> Result<f64> {
    let imperfect = link.eta < 1.0 || link.nu_el > 0.0;
    if link.trusted_detector && imperfect && link.direction == Direction::Reverse {
        return trusted_rr(link);
    }
    let l = if imperfect { link.folded() } else { *link };
    ideal_holevo(&l)
}

fn ideal_holevo(l: &LinkModel) -> Result<f64> {
    let t = l.transmittance;
    let v = l.v_a + 1.0;
    let w = 1.0 - t + t * l.xi;
    let b = t * v + w;
    let d = v * w + t;
    let a = v * v * (1.0 - t).powi(2) + 2.0 * t * v * w + w * w + 2.0 * t;
    let (n1, n2) = two_mode_eigenvalues(a, d);
    check_physical(&[n1, n2])?;
    let s_ab = g_entropy(n1) + g_entropy(n2);
    match l.direction {
        Direction::Reverse => {
            let n3 = match l.kind {
                DetectionKind::Homodyne => (v * d / b).sqrt(),
                DetectionKind::Heterodyne => (v * (w + 1.0) + t) / (b + 1.0),
            };
            check_physical(&[n3])?;
            Ok(s_ab - g_entropy(n3))
        }
        Direction::Direct => {
            let vc = match l.kind {
                DetectionKind::Homodyne => v,
                DetectionKind::Heterodyne => 1.0,
            };
            let dq = (1.0 - t).powi(2) * vc + t * (1.0 + vc) * w + w * w + 2.0 * t;
            let sq = ((w + t) * (vc * w + t)).sqrt();
            let (m1, m2) = two_mode_eigenvalues(dq, sq);
            check_physical(&[m1, m2])?;
            Ok(s_ab - g_entropy(m1) - g_entropy(m2))
        }
    }
}

/// Reverse reconciliation with trusted detector loss and electronic noise.
fn trusted_rr(l: &LinkModel) -> Result<f64> {
    let t = l.transmittance;
    let eta = l.eta;
    let v = l.v_a + 1.0;
    let chi_line = 1.0 / t - 1.0 + l.xi;
    let chi_det = match l.kind {
        DetectionKind::Homodyne => (1.0 - eta + l.nu_el) / eta,
        DetectionKind::Heterodyne => (2.0 - eta + 2.0 * l.nu_el) / eta,
    };
    let chi_tot = chi_line + chi_det / t;
    let a = v * v * (1.0 - 2.0 * t) + 2.0 * t + t * t * (v + chi_line).powi(2);
    let sqrt_b = t * (v * chi_line + 1.0);
    let (n1, n2) = two_mode_eigenvalues(a, sqrt_b);
    let den = t * (v + chi_tot);
    let (c, d) = match l.kind {
        DetectionKind::Homodyne => {
            let c = (a * chi_det + v * sqrt_b + t * (v + chi_line)) / den;
            let d = sqrt_b * (v + sqrt_b * chi_det) / den;
            (c, d)
        }
        DetectionKind::Heterodyne => {
            let c = (a * chi_det * chi_det
                + sqrt_b * sqrt_b
                + 1.0
                + 2.0 * chi_det * (v * sqrt_b + t * (v + chi_line))
                + 2.0 * t * (v * v - 1.0))
                / (den * den);
            let d = ((v + sqrt_b * chi_det) / den).powi(2);
            (c, d)
        }
    };
    let (n3, n4) = two_mode_eigenvalues(c, d.sqrt());
    check_physical(&[n1, n2, n3, n4])?;
    Ok(g_entropy(n1) + g_entropy(n2) - g_entropy(n3) - g_entropy(n4))
}

/// Asymptotic rate β·I_AB − χ at the link's own parameters.
pub fn asymptotic_rate(link: &LinkModel, beta: f64) -> Result<KeyRate> {
    let mutual_info = mutual_information(link.snr(), link.kind);
    let holevo = holevo_bound(link)?;
    Ok(KeyRate { mutual_info, holevo, skr: beta * mutual_info - holevo })
}
