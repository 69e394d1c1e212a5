use serde::{Deserialize, Serialize};

use super::octonion::Octonion;
use crate::error::{Error, Result};

/// Block dimension of the multidimensional mapping.
pub const DIM: usize = 8;

/// Rotation sent publicly for one 8-dimensional block: left multiplication
/// by the unit octonion α with α·(y/‖y‖) = u.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MdRotation {
    pub coefficients: [f64; DIM],
}

impl MdRotation {
    pub fn identity() -> Self {
        Self { coefficients: Octonion::ONE.0 }
    }

    /// Applies the rotation M·v.
    pub fn apply(&self, v: &[f64]) -> [f64; DIM] {
        let mut o = [0.0; DIM];
        o.copy_from_slice(&v[..DIM]);
        (Octonion(self.coefficients) * Octonion(o)).0
    }
}

/// Maps ±1 sign bits (0 → +, 1 → −) to the unit-norm point u ∈ {±1/√8}⁸.
pub fn bits_to_point(bits: &[u8]) -> [f64; DIM] {
    let a = 1.0 / (DIM as f64).sqrt();
    let mut u = [0.0; DIM];
    for (v, &b) in u.iter_mut().zip(bits) {
        *v = if b == 0 { a } else { -a };
    }
    u
}

/// Rotation coefficients for a data block `y` and target point `u`:
/// α = u·conj(y/‖y‖). Alternativity gives α·(y/‖y‖) = u.
pub fn md_project(y: &[f64], u: &[f64]) -> Result<MdRotation> {
    if y.len() != DIM || u.len() != DIM {
        return Err(Error::LengthMismatch { expected: DIM, actual: y.len().min(u.len()) });
    }
    let mut yo = [0.0; DIM];
    yo.copy_from_slice(y);
    let yo = Octonion(yo);
    let n = yo.norm();
    if !(n > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let mut uo = [0.0; DIM];
    uo.copy_from_slice(u);
    let alpha = Octonion(uo) * yo.conj().scale(1.0 / n);
    Ok(MdRotation { coefficients: alpha.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligned_block_gives_identity() {
        let u = bits_to_point(&[0, 1, 1, 0, 0, 0, 1, 0]);
        let y: Vec<f64> = u.iter().map(|v| v * 3.7).collect();
        let m = md_project(&y, &u).unwrap();
        for (a, b) in m.coefficients.iter().zip(MdRotation::identity().coefficients) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_block_is_rejected() {
        let u = bits_to_point(&[0; 8]);
        assert!(matches!(md_project(&[0.0; 8], &u), Err(Error::ZeroNorm)));
    }
}
