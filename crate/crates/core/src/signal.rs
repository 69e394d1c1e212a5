//! Sampled-signal utilities shared by the transmitter, channel and receiver:
//! FFT convolution, spectral operators, and the `.iq` interchange format.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Forward FFT in place.
pub fn fft(buf: &mut [Complex64]) {
    FftPlanner::new().plan_fft_forward(buf.len()).process(buf);
}

/// Inverse FFT in place, normalized by 1/N.
pub fn ifft(buf: &mut [Complex64]) {
    let n = buf.len();
    FftPlanner::new().plan_fft_inverse(n).process(buf);
    let s = 1.0 / n as f64;
    for v in buf.iter_mut() {
        *v *= s;
    }
}

/// Full linear convolution of a complex signal with real taps, via FFT.
pub fn convolve(x: &[Complex64], h: &[f64]) -> Vec<Complex64> {
    if x.is_empty() || h.is_empty() {
        return Vec::new();
    }
    let out_len = x.len() + h.len() - 1;
    if h.len() <= 64 || x.len() <= 64 {
        let mut out = vec![Complex64::new(0.0, 0.0); out_len];
        for (i, xi) in x.iter().enumerate() {
            for (j, hj) in h.iter().enumerate() {
                out[i + j] += xi * hj;
            }
        }
        return out;
    }
    let n = out_len.next_power_of_two();
    let mut a = vec![Complex64::new(0.0, 0.0); n];
    a[..x.len()].copy_from_slice(x);
    let mut b = vec![Complex64::new(0.0, 0.0); n];
    for (d, &s) in b.iter_mut().zip(h) {
        d.re = s;
    }
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (u, v) in a.iter_mut().zip(&b) {
        *u *= v;
    }
    planner.plan_fft_inverse(n).process(&mut a);
    let s = 1.0 / n as f64;
    a.truncate(out_len);
    for v in a.iter_mut() {
        *v *= s;
    }
    a
}

/// Zero-phase filtering with an odd-length symmetric filter: the output has
/// the input's length and sample `k` is centered on input sample `k`.
pub fn filter_centered(x: &[Complex64], h: &[f64]) -> Vec<Complex64> {
    debug_assert!(h.len() % 2 == 1);
    let d = (h.len() - 1) / 2;
    let full = convolve(x, h);
    full[d..d + x.len()].to_vec()
}

/// Angular frequency (rad/sample) of FFT bin `k` out of `n`, in [-π, π).
pub fn bin_omega(k: usize, n: usize) -> f64 {
    let k = k as f64;
    let n_f = n as f64;
    let kk = if k >= n_f / 2.0 { k - n_f } else { k };
    2.0 * PI * kk / n_f
}

/// Multiplies the spectrum by `response(ω)` with ω in rad/sample. The
/// signal is zero-padded by `pad` samples before the transform so that
/// circular wrap-around of the response tail stays outside the output.
pub fn apply_frequency_response<F>(x: &[Complex64], pad: usize, response: F) -> Vec<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let n = (x.len() + pad).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    buf[..x.len()].copy_from_slice(x);
    fft(&mut buf);
    for (k, v) in buf.iter_mut().enumerate() {
        *v *= response(bin_omega(k, n));
    }
    ifft(&mut buf);
    buf.truncate(x.len());
    buf
}

/// Delays a band-limited signal by a (possibly fractional) number of
/// samples; the length is unchanged and the head is filled by the delay.
pub fn fractional_delay(x: &[Complex64], delay: f64) -> Vec<Complex64> {
    if delay == 0.0 {
        return x.to_vec();
    }
    let pad = 2 * delay.abs().ceil() as usize + 64;
    apply_frequency_response(x, pad, |w| Complex64::from_polar(1.0, -w * delay))
}

/// Multiplies by exp(i·2π·f·n).
pub fn mix(x: &[Complex64], freq: f64) -> Vec<Complex64> {
    x.iter()
        .enumerate()
        .map(|(n, v)| v * Complex64::from_polar(1.0, 2.0 * PI * freq * n as f64))
        .collect()
}

/// Mean of |x|².
pub fn mean_power(x: &[Complex64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.iter().map(|v| v.norm_sqr()).sum::<f64>() / x.len() as f64
}

/// Population variance of real samples.
pub fn variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

/// Per-quadrature variance of complex samples (real and imaginary pooled).
pub fn quadrature_variance(x: &[Complex64]) -> f64 {
    let mut flat = Vec::with_capacity(2 * x.len());
    for v in x {
        flat.push(v.re);
        flat.push(v.im);
    }
    variance(&flat)
}

/// First index with a non-finite component.
pub fn check_finite(x: &[Complex64]) -> Result<()> {
    match x.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}

const IQ_MAGIC: &[u8; 4] = b"CVQK";
const IQ_VERSION: u32 = 1;

/// Writes an `.iq` file: 32-byte header (magic, version u32, sps u32,
/// sample count u64, 12 reserved bytes) then interleaved little-endian f64
/// I/Q pairs.
pub fn write_iq(path: &Path, samples: &[Complex64], sps: u32) -> Result<()> {
    let mut out = Vec::with_capacity(32 + 16 * samples.len());
    out.extend_from_slice(IQ_MAGIC);
    out.extend_from_slice(&IQ_VERSION.to_le_bytes());
    out.extend_from_slice(&sps.to_le_bytes());
    out.extend_from_slice(&(samples.len() as u64).to_le_bytes());
    out.extend_from_slice(&[0u8; 12]);
    for v in samples {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    std::fs::File::create(path)?.write_all(&out)?;
    Ok(())
}

/// Reads an `.iq` file, returning the samples and the samples-per-symbol.
pub fn read_iq(path: &Path) -> Result<(Vec<Complex64>, u32)> {
    let mut raw = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut raw)?;
    let bad = |m: &str| Error::InvalidParameter(format!("{}: {m}", path.display()));
    if raw.len() < 32 || &raw[..4] != IQ_MAGIC {
        return Err(bad("not an .iq file"));
    }
    let u32_at = |i: usize| u32::from_le_bytes(raw[i..i + 4].try_into().unwrap());
    if u32_at(4) != IQ_VERSION {
        return Err(bad("unsupported version"));
    }
    let sps = u32_at(8);
    let len = u64::from_le_bytes(raw[12..20].try_into().unwrap()) as usize;
    if raw.len() != 32 + 16 * len {
        return Err(bad("truncated payload"));
    }
    let f = |i: usize| f64::from_le_bytes(raw[i..i + 8].try_into().unwrap());
    let samples = (0..len)
        .map(|k| Complex64::new(f(32 + 16 * k), f(40 + 16 * k)))
        .collect();
    Ok((samples, sps))
}
