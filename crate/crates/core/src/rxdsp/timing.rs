use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Gardner loop settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GardnerConfig {
    /// Loop noise bandwidth normalized to the symbol rate (BnT).
    pub loop_bandwidth: f64,
    pub damping: f64,
    /// Half-width of the windowed-sinc interpolator, in samples.
    pub interp_half_taps: usize,
    /// Symbols after which the loop must have settled.
    pub max_symbols: usize,
}

impl Default for GardnerConfig {
    fn default() -> Self {
        Self { loop_bandwidth: 1e-3, damping: 0.707, interp_half_taps: 16, max_symbols: 20_000 }
    }
}

/// Result of clock recovery.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingEstimate {
    /// Sampling phase in symbols, wrapped to (−0.5, 0.5].
    pub tau: f64,
    pub converged: bool,
    /// Loop phase after each symbol (unwrapped).
    pub trace: Vec<f64>,
}

/// Raised-cosine pulse (the matched RRC pair) at `t` symbols.
pub fn raised_cosine(t: f64, rolloff: f64) -> f64 {
    let sinc = if t == 0.0 { 1.0 } else { (PI * t).sin() / (PI * t) };
    let d = 2.0 * rolloff * t;
    if (1.0 - d * d).abs() < 1e-10 {
        return PI / 4.0 * sinc_of(1.0 / (2.0 * rolloff));
    }
    sinc * (PI * rolloff * t).cos() / (1.0 - d * d)
}

fn sinc_of(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        (PI * t).sin() / (PI * t)
    }
}

/// Mean Gardner detector output per unit signal power at sampling error `eps`
/// (symbols), for i.i.d. symbols through a raised-cosine pulse.
pub fn ted_s_curve(eps: f64, rolloff: f64) -> f64 {
    let g = |t: f64| raised_cosine(t, rolloff);
    (-200..=200)
        .map(|j| {
            let j = j as f64;
            (g(j - 1.0 + eps) - g(j + eps)) * g(j - 0.5 + eps)
        })
        .sum()
}

/// Slope of the S-curve at zero.
pub fn ted_gain(rolloff: f64) -> f64 {
    let h = 1e-4;
    (ted_s_curve(h, rolloff) - ted_s_curve(-h, rolloff)) / (2.0 * h)
}

/// Gardner timing error: Re{(x[k−1] − x[k])·conj(x[k−½])}.
pub fn gardner_ted(prev: Complex64, mid: Complex64, cur: Complex64) -> f64 {
    ((prev - cur) * mid.conj()).re
}

/// Blackman-windowed sinc taps for fractional offset `mu` ∈ [0, 1),
/// covering input offsets `1 − half ..= half`.
fn interp_taps(mu: f64, half: usize) -> Vec<f64> {
    let h = half as i64;
    let w_len = half as f64 + 1.0;
    // sin(π(i − μ)) = (−1)^(i+1)·sin(πμ)
    let s = (PI * mu).sin();
    ((1 - h)..=h)
        .map(|i| {
            if mu == 0.0 {
                return if i == 0 { 1.0 } else { 0.0 };
            }
            let t = i as f64 - mu;
            let sign = if i.rem_euclid(2) == 0 { -1.0 } else { 1.0 };
            let w = 0.42 + 0.5 * (PI * t / w_len).cos() + 0.08 * (2.0 * PI * t / w_len).cos();
            sign * s / (PI * t) * w
        })
        .collect()
}

fn apply_taps(x: &[Complex64], base: i64, taps: &[f64], half: usize) -> Complex64 {
    let first = base + 1 - half as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    if first >= 0 && (first as usize) + taps.len() <= x.len() {
        let seg = &x[first as usize..first as usize + taps.len()];
        for (v, t) in seg.iter().zip(taps) {
            acc += v * t;
        }
    } else {
        for (j, t) in taps.iter().enumerate() {
            let idx = first + j as i64;
            if idx >= 0 && (idx as usize) < x.len() {
                acc += x[idx as usize] * t;
            }
        }
    }
    acc
}

/// Blackman-windowed sinc interpolation of `x` at fractional index `pos`.
/// Samples outside the record count as zero.
pub fn interpolate(x: &[Complex64], pos: f64, half: usize) -> Complex64 {
    let base = pos.floor();
    apply_taps(x, base as i64, &interp_taps(pos - base, half), half)
}

/// Interpolates at `k·step + offset` for every `k` in `range`; the
/// fractional phase is shared, so the taps are computed once.
fn interpolate_grid(x: &[Complex64], step: usize, offset: f64, range: std::ops::Range<usize>, half: usize) -> Vec<Complex64> {
    let base = offset.floor();
    let taps = interp_taps(offset - base, half);
    range.map(|k| apply_taps(x, (k * step) as i64 + base as i64, &taps, half)).collect()
}

/// Samples `x` at `(k + tau)·sps` for every symbol `k` that fits.
pub fn resample(x: &[Complex64], sps: usize, tau: f64, half: usize) -> Vec<Complex64> {
    interpolate_grid(x, sps, tau * sps as f64, 0..x.len() / sps, half)
}

fn spread(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let m = x.iter().sum::<f64>() / x.len() as f64;
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / x.len() as f64
}

/// Mean Gardner detector output with every symbol sampled at phase `tau`.
fn mean_ted(x: &[Complex64], sps: usize, tau: f64, half: usize) -> f64 {
    let n = x.len() / sps;
    let s = sps as f64;
    let (lo, hi) = (2, n.saturating_sub(2));
    if hi <= lo {
        return 0.0;
    }
    let cur = interpolate_grid(x, sps, tau * s, lo..hi, half);
    let mid = interpolate_grid(x, sps, (tau - 0.5) * s, lo..hi, half);
    let prev = interpolate_grid(x, sps, (tau - 1.0) * s, lo..hi, half);
    let sum: f64 = (0..hi - lo).map(|i| gardner_ted(prev[i], mid[i], cur[i])).sum();
    sum / (hi - lo) as f64
}

fn wrap_half(t: f64) -> f64 {
    let w = t - t.round();
    if w <= -0.5 {
        w + 1.0
    } else {
        w
    }
}

/// Closed-loop Gardner clock recovery on matched-filtered samples.
/// Returns the symbol-rate samples at the settled phase and the estimate.
pub fn gardner_recover(x: &[Complex64], sps: usize, rolloff: f64, cfg: &GardnerConfig) -> Result<(Vec<Complex64>, TimingEstimate)> {
    if sps < 2 {
        return Err(invalid("Gardner timing recovery needs sps ≥ 2"));
    }
    if !(cfg.loop_bandwidth > 0.0 && cfg.loop_bandwidth < 0.5) || cfg.damping <= 0.0 {
        return Err(invalid("loop bandwidth must be in (0, 0.5) and damping positive"));
    }
    let n_sym = x.len() / sps;
    if n_sym < 16 {
        return Err(invalid("too few symbols for timing recovery"));
    }
    let kd = ted_gain(rolloff);
    let power = x.iter().map(|v| v.norm_sqr()).sum::<f64>() / x.len() as f64;
    if !(power > 0.0) || kd == 0.0 {
        return Err(invalid("timing recovery needs a non-zero signal"));
    }
    let theta = cfg.loop_bandwidth / (cfg.damping + 0.25 / cfg.damping);
    let den = 1.0 + 2.0 * cfg.damping * theta + theta * theta;
    let k1 = 4.0 * cfg.damping * theta / den;
    let k2 = 4.0 * theta * theta / den;
    let half = cfg.interp_half_taps;
    let s = sps as f64;
    let mut tau = 0.0;
    let mut integ = 0.0;
    let mut trace = Vec::with_capacity(n_sym);
    let mut errs = Vec::with_capacity(n_sym);
    for k in 1..n_sym {
        let kf = k as f64;
        let cur = interpolate(x, (kf + tau) * s, half);
        let mid = interpolate(x, (kf - 0.5 + tau) * s, half);
        let prev = interpolate(x, (kf - 1.0 + tau) * s, half);
        // Normalized so that err ≈ sampling error in symbols.
        let err = gardner_ted(prev, mid, cur) / (power * kd);
        errs.push(err);
        integ += k2 * err;
        tau -= k1 * err + integ;
        trace.push(tau);
    }
    let m = trace.len();
    // The loop's phase is correlated with its own pattern noise, which
    // biases the settled point; the block-averaged detector output at a
    // fixed phase is not, so a few Newton steps on it refine the estimate.
    let settled = &trace[m / 4..3 * m / 4];
    let mut mean = settled.iter().sum::<f64>() / settled.len() as f64;
    let mut step = f64::INFINITY;
    for _ in 0..4 {
        step = mean_ted(x, sps, mean, half) / (power * kd);
        mean -= step;
        if step.abs() < 1e-5 {
            break;
        }
    }
    // Settling: past `max_symbols` the detector output must not get
    // noisier towards the end, and the refinement must have stopped moving.
    let window = cfg.max_symbols.clamp(4, m);
    let after = &errs[window.min(m - m / 4)..];
    let last = &errs[3 * m / 4..];
    let converged = spread(last) <= 1.1 * spread(after) && step.abs() < 0.01;
    let tau = wrap_half(mean);
    let out = resample(x, sps, tau, half);
    Ok((out, TimingEstimate { tau, converged, trace }))
}
