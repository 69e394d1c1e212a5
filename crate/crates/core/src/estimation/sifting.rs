use num_complex::Complex64;

use crate::channel::Quadrature;
use crate::error::{Error, Result};

/// Pairs Alice's registers with Bob's values. With homodyne basis choices
/// Alice keeps the measured quadrature of each symbol (L values); without
/// them (heterodyne) both quadratures are kept, interleaved (q, p), giving
/// 2L values.
pub fn sift(alice: &[Complex64], basis: Option<&[Quadrature]>, bob: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    match basis {
        Some(basis) => {
            if basis.len() != alice.len() {
                return Err(Error::LengthMismatch { expected: alice.len(), actual: basis.len() });
            }
            if bob.len() != alice.len() {
                return Err(Error::LengthMismatch { expected: alice.len(), actual: bob.len() });
            }
            let x = alice
                .iter()
                .zip(basis)
                .map(|(a, b)| match b {
                    Quadrature::Q => a.re,
                    Quadrature::P => a.im,
                })
                .collect();
            Ok((x, bob.to_vec()))
        }
        None => {
            if bob.len() != 2 * alice.len() {
                return Err(Error::LengthMismatch { expected: 2 * alice.len(), actual: bob.len() });
            }
            let x = alice.iter().flat_map(|a| [a.re, a.im]).collect();
            Ok((x, bob.to_vec()))
        }
    }
}
