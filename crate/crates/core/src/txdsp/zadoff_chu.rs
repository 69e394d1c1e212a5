use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Zadoff-Chu sequence of `length` with root `root` (coprime with length).
pub fn zadoff_chu(length: usize, root: usize) -> Result<Vec<Complex64>> {
    if length == 0 {
        return Err(invalid("Zadoff-Chu length must be positive"));
    }
    if root == 0 || gcd(root, length) != 1 {
        return Err(invalid(format!("ZC root {root} is not coprime with length {length}")));
    }
    let n_f = length as f64;
    let parity = (length % 2) as f64;
    Ok((0..length)
        .map(|k| {
            let k = k as f64;
            // Reduce the quadratic phase modulo 2N before scaling, to keep
            // the argument small and the sequence exactly periodic.
            let q = ((root as f64) * k * (k + parity)) % (2.0 * n_f);
            Complex64::from_polar(1.0, -PI * q / n_f)
        })
        .collect())
}

/// Circular autocorrelation Σ_k z[k]·conj(z[(k+shift) mod N]).
pub fn circular_autocorrelation(z: &[Complex64], shift: usize) -> Complex64 {
    let n = z.len();
    (0..n).map(|k| z[k] * z[(k + shift) % n].conj()).sum()
}
