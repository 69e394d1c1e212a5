//! Seeded randomness boundary.
//!
//! Every stochastic stage takes a generic [`rand::Rng`], so a hardware
//! entropy source can be substituted for the counter-based ChaCha stream
//! used in simulation. Gaussian variates use the Marsaglia polar method on
//! 53-bit uniforms; regression files depend on this exact sampler.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Independent random streams of a single run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Modulation = 1,
    Channel = 2,
    Detector = 3,
    Calibration = 4,
    Disclosure = 5,
    Reconciliation = 6,
    Privacy = 7,
}

/// ChaCha20 stream `stream` of `seed`. Streams never overlap.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Seed for run `index` of a sweep, derived from the global seed.
pub fn derive_seed(global: u64, index: u64) -> u64 {
    let mut rng = stream_rng(global, 0x5eed_0000 + index);
    rng.gen()
}

/// Uniform on the open interval (-1, 1).
fn open_uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    2.0 * rng.gen::<f64>() - 1.0
}

/// Pair of independent standard normals (Marsaglia polar method).
pub fn normal_pair<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    loop {
        let u = open_uniform(rng);
        let v = open_uniform(rng);
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            let f = (-2.0 * s.ln() / s).sqrt();
            return (u * f, v * f);
        }
    }
}

/// Complex normal whose real and imaginary parts each have variance `var`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let (a, b) = normal_pair(rng);
    let s = var.sqrt();
    Complex64::new(a * s, b * s)
}

/// `n` real normals with variance `var`, drawn in pairs.
pub fn real_normals<R: Rng + ?Sized>(rng: &mut R, n: usize, var: f64) -> Vec<f64> {
    let s = var.sqrt();
    let mut out = Vec::with_capacity(n + 1);
    while out.len() < n {
        let (a, b) = normal_pair(rng);
        out.push(a * s);
        out.push(b * s);
    }
    out.truncate(n);
    out
}

/// Fair coin flips packed as bools.
pub fn coin_flips<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<bool> {
    (0..n).map(|_| rng.gen::<bool>()).collect()
}
