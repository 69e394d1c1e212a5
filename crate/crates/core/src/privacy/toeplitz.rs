use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ntt::{cyclic_convolution, MAX_LEN};
use crate::error::{invalid, Error, Result};
use crate::rng::{stream_rng, Stream};

/// Public seed of an m_out × n_in Toeplitz hash: T[i][j] = bits[i − j + n_in − 1].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToeplitzSeed {
    pub bits: Vec<u8>,
    pub n_in: usize,
    pub m_out: usize,
    pub rng_seed: u64,
}

impl ToeplitzSeed {
    /// Draws the seed from the privacy stream of `rng_seed`.
    pub fn generate(n_in: usize, m_out: usize, rng_seed: u64) -> Result<Self> {
        let mut rng = stream_rng(rng_seed, Stream::Privacy as u64);
        Self::from_rng(&mut rng, n_in, m_out, rng_seed)
    }

    pub fn from_rng<R: Rng + ?Sized>(rng: &mut R, n_in: usize, m_out: usize, rng_seed: u64) -> Result<Self> {
        check_dims(n_in, m_out)?;
        let bits = (0..n_in + m_out - 1).map(|_| rng.gen::<bool>() as u8).collect();
        Ok(Self { bits, n_in, m_out, rng_seed })
    }

    pub fn from_bits(bits: Vec<u8>, n_in: usize, m_out: usize) -> Result<Self> {
        check_dims(n_in, m_out)?;
        if bits.len() != n_in + m_out - 1 {
            return Err(Error::LengthMismatch { expected: n_in + m_out - 1, actual: bits.len() });
        }
        Ok(Self { bits, n_in, m_out, rng_seed: 0 })
    }
}

fn check_dims(n_in: usize, m_out: usize) -> Result<()> {
    if n_in == 0 || m_out == 0 || m_out > n_in {
        return Err(invalid(format!("Toeplitz dimensions m_out={m_out}, n_in={n_in} need 0 < m_out ≤ n_in")));
    }
    Ok(())
}

/// Secret-key length after hashing: ⌊n·K − 2·log₂(1/ε_h)⌋, clamped at 0.
pub fn final_key_length(skr_finite: f64, n_key: usize, epsilon_h: f64) -> usize {
    if !(skr_finite > 0.0) {
        return 0;
    }
    let m = n_key as f64 * skr_finite - 2.0 * (1.0 / epsilon_h).log2();
    if m <= 0.0 {
        0
    } else {
        m.floor() as usize
    }
}

/// Hashes `key` (0/1 values) with the Toeplitz matrix of `seed`, via a
/// number-theoretic cyclic convolution of length ≥ n_in + m_out − 1.
pub fn toeplitz_extract(key: &[u8], seed: &ToeplitzSeed) -> Result<Vec<u8>> {
    if key.len() != seed.n_in {
        return Err(Error::LengthMismatch { expected: seed.n_in, actual: key.len() });
    }
    if seed.bits.len() != seed.n_in + seed.m_out - 1 {
        return Err(Error::LengthMismatch { expected: seed.n_in + seed.m_out - 1, actual: seed.bits.len() });
    }
    let n = seed.n_in;
    let len = (n + seed.m_out - 1).next_power_of_two();
    if len > MAX_LEN {
        return Err(invalid("key too long for the transform"));
    }
    let conv = cyclic_convolution(&seed.bits, key, len);
    Ok((0..seed.m_out).map(|i| (conv[i + n - 1] & 1) as u8).collect())
}
