use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::ldpc::LLR_CLIP;
use crate::error::{Error, Result};

/// Sign-reconciliation baseline output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignReconciliation {
    pub alice_bits: Vec<u8>,
    pub bob_bits: Vec<u8>,
    pub mismatch_rate: f64,
}

fn sign_bit(v: f64) -> u8 {
    (v < 0.0) as u8
}

/// Both sides take the sign of their value as the key bit (1 for negative).
pub fn sign_reconcile(x: &[f64], y: &[f64]) -> Result<SignReconciliation> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { expected: x.len(), actual: y.len() });
    }
    let alice_bits: Vec<u8> = x.iter().map(|&v| sign_bit(v)).collect();
    let bob_bits: Vec<u8> = y.iter().map(|&v| sign_bit(v)).collect();
    let mismatches = alice_bits.iter().zip(&bob_bits).filter(|(a, b)| a != b).count();
    let mismatch_rate = if x.is_empty() { 0.0 } else { mismatches as f64 / x.len() as f64 };
    Ok(SignReconciliation { alice_bits, bob_bits, mismatch_rate })
}

/// Alice's LLRs for Bob's sign bits given Y = tX + Z, Z ~ N(0, σ²):
/// log Φ(a)/Φ(−a) with a = t·x/σ. These feed the LDPC path as the
/// one-dimensional case of the rotation mapping.
pub fn sign_llrs(x: &[f64], t: f64, sigma2: f64) -> Vec<f64> {
    let s = sigma2.sqrt();
    x.iter()
        .map(|&v| {
            let a = t * v / s;
            let p = 0.5 * erfc(-a / std::f64::consts::SQRT_2);
            let q = 0.5 * erfc(a / std::f64::consts::SQRT_2);
            let l = if q <= 0.0 {
                LLR_CLIP
            } else if p <= 0.0 {
                -LLR_CLIP
            } else {
                p.ln() - q.ln()
            };
            l.clamp(-LLR_CLIP, LLR_CLIP)
        })
        .collect()
}
