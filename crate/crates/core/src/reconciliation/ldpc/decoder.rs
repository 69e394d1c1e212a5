use super::code::{syndrome_expanded, LdpcCode};
use crate::error::{Error, Result};

/// Channel LLRs are clipped to this magnitude.
pub const LLR_CLIP: f64 = 50.0;

/// Default iteration budget.
pub const DEFAULT_MAX_ITER: usize = 200;

/// Outcome of syndrome-constrained belief propagation.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    /// Decoded bits; present only when H·bits equals the target syndrome.
    pub bits: Option<Vec<u8>>,
    /// Iterations run; 0 when the channel hard decision already matched.
    pub iterations: usize,
}

impl DecodeOutcome {
    pub fn success(&self) -> bool {
        self.bits.is_some()
    }
}

fn hard(llr: &[f64]) -> Vec<u8> {
    llr.iter().map(|&l| (l < 0.0) as u8).collect()
}

/// Flooding sum-product decoding towards `syndrome`. LLRs are
/// log(P(0)/P(1)). Each check node enforces parity `syndrome[r]`.
pub fn bp_decode(llr_in: &[f64], syndrome: &[u8], code: &LdpcCode, max_iter: usize) -> Result<DecodeOutcome> {
    if llr_in.len() != code.n {
        return Err(Error::LengthMismatch { expected: code.n, actual: llr_in.len() });
    }
    if syndrome.len() != code.syndrome_len() {
        return Err(Error::LengthMismatch { expected: code.syndrome_len(), actual: syndrome.len() });
    }
    let llr: Vec<f64> = llr_in.iter().map(|&l| l.clamp(-LLR_CLIP, LLR_CLIP)).collect();
    let bits = hard(&llr);
    if syndrome_expanded(&bits, code) == syndrome {
        return Ok(DecodeOutcome { bits: Some(bits), iterations: 0 });
    }

    // Edge storage in check order; var_edges maps each variable to its edges.
    let mut offsets = Vec::with_capacity(code.checks.len() + 1);
    let mut edge_var = Vec::with_capacity(code.edge_count());
    offsets.push(0);
    for cols in &code.checks {
        edge_var.extend(cols.iter().map(|&c| c as usize));
        offsets.push(edge_var.len());
    }
    let mut var_edges = vec![Vec::new(); code.n];
    for (e, &v) in edge_var.iter().enumerate() {
        var_edges[v].push(e);
    }
    let mut v2c: Vec<f64> = edge_var.iter().map(|&v| llr[v]).collect();
    let mut c2v = vec![0.0; edge_var.len()];
    let mut tanh = Vec::new();
    let mut prefix = Vec::new();
    let mut total = llr.clone();

    for it in 1..=max_iter {
        for r in 0..code.checks.len() {
            let (a, b) = (offsets[r], offsets[r + 1]);
            let sign = if syndrome[r] & 1 == 1 { -1.0 } else { 1.0 };
            tanh.clear();
            tanh.extend(v2c[a..b].iter().map(|&m| (0.5 * m).tanh()));
            // Leave-one-out products via prefix/suffix passes.
            prefix.clear();
            let mut p = 1.0;
            for &t in &tanh {
                prefix.push(p);
                p *= t;
            }
            let mut suffix = 1.0;
            for j in (0..tanh.len()).rev() {
                let prod = (prefix[j] * suffix).clamp(-0.999_999_999_999, 0.999_999_999_999);
                c2v[a + j] = (sign * 2.0 * prod.atanh()).clamp(-LLR_CLIP, LLR_CLIP);
                suffix *= tanh[j];
            }
        }
        for v in 0..code.n {
            let edges = &var_edges[v];
            let sum: f64 = llr[v] + edges.iter().map(|&e| c2v[e]).sum::<f64>();
            total[v] = sum;
            for &e in edges {
                v2c[e] = (sum - c2v[e]).clamp(-LLR_CLIP, LLR_CLIP);
            }
        }
        let bits = hard(&total);
        if syndrome_expanded(&bits, code) == syndrome {
            return Ok(DecodeOutcome { bits: Some(bits), iterations: it });
        }
    }
    Ok(DecodeOutcome { bits: None, iterations: max_iter })
}
