use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::signal;

/// Pilot extraction settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PilotConfig {
    /// Low-pass cutoff around the pilot, cycles/sample.
    pub cutoff: f64,
    /// Half-length of the Blackman-windowed sinc low-pass, in samples.
    pub half_taps: usize,
    /// Below this pilot SNR the track is flagged invalid and no correction
    /// is applied.
    pub snr_threshold_db: f64,
}

impl Default for PilotConfig {
    fn default() -> Self {
        Self { cutoff: 0.004, half_taps: 1024, snr_threshold_db: 10.0 }
    }
}

/// Phase of the received pilot per oversampled sample.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotTrack {
    /// Unwrapped pilot phase, radians.
    pub phase: Vec<f64>,
    /// Pilot power over the in-band noise estimate.
    pub snr_db: f64,
    /// Slope of a least-squares line through the phase, cycles/sample.
    pub freq_offset: f64,
    pub valid: bool,
}

impl PilotTrack {
    /// Phase at a fractional sample position, linearly interpolated.
    pub fn phase_at(&self, pos: f64) -> f64 {
        let n = self.phase.len();
        if n == 0 {
            return 0.0;
        }
        let p = pos.clamp(0.0, (n - 1) as f64);
        let i = p.floor() as usize;
        if i + 1 >= n {
            return self.phase[n - 1];
        }
        let f = p - i as f64;
        self.phase[i] * (1.0 - f) + self.phase[i + 1] * f
    }

    /// Model phase-error variance of the tracked pilot, 1/(2·SNR).
    pub fn residual_phase_var(&self) -> f64 {
        0.5 * 10f64.powf(-self.snr_db / 10.0)
    }
}

/// Blackman-windowed sinc low-pass with unit DC gain.
pub fn lowpass_taps(cutoff: f64, half: usize) -> Vec<f64> {
    let len = 2 * half + 1;
    let m = (len - 1) as f64;
    let mut h: Vec<f64> = (0..len)
        .map(|n| {
            let t = n as f64 - half as f64;
            let sinc = if t == 0.0 { 2.0 * cutoff } else { (2.0 * PI * cutoff * t).sin() / (PI * t) };
            let w = 0.42 - 0.5 * (2.0 * PI * n as f64 / m).cos() + 0.08 * (4.0 * PI * n as f64 / m).cos();
            sinc * w
        })
        .collect();
    let s: f64 = h.iter().sum();
    for v in h.iter_mut() {
        *v /= s;
    }
    h
}

/// Unwraps a phase sequence in place.
pub fn unwrap(phase: &mut [f64]) {
    let mut offset = 0.0;
    for i in 1..phase.len() {
        let raw = phase[i] + offset;
        let d = raw - phase[i - 1];
        let k = (d / (2.0 * PI)).round();
        offset -= k * 2.0 * PI;
        phase[i] = raw - k * 2.0 * PI;
    }
}

/// Least-squares slope of `y` against its index.
fn slope(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    if y.len() < 2 {
        return 0.0;
    }
    let mx = (n - 1.0) / 2.0;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, v) in y.iter().enumerate() {
        let dx = i as f64 - mx;
        sxy += dx * (v - my);
        sxx += dx * dx;
    }
    sxy / sxx
}

/// Separates the pilot at `freq` from `x`: returns the signal with the
/// reconstructed pilot subtracted (unchanged when the pilot is too weak)
/// and the pilot phase track.
pub fn extract_pilot(x: &[Complex64], freq: f64, cfg: &PilotConfig) -> (Vec<Complex64>, PilotTrack) {
    let mixed = signal::mix(x, -freq);
    let taps = lowpass_taps(cfg.cutoff, cfg.half_taps);
    let env = signal::filter_centered(&mixed, &taps);
    let pilot_power = signal::mean_power(&env);
    let rest = (signal::mean_power(x) - pilot_power).max(1e-300);
    let in_band = rest * 2.0 * cfg.cutoff;
    let snr_db = 10.0 * (pilot_power / in_band).max(1e-300).log10();
    let mut phase: Vec<f64> = env.iter().map(|v| v.arg()).collect();
    unwrap(&mut phase);
    let edge = cfg.half_taps.min(phase.len() / 4);
    let freq_offset = slope(&phase[edge..phase.len() - edge]) / (2.0 * PI);
    let valid = snr_db >= cfg.snr_threshold_db;
    let cleaned = if valid {
        x.iter()
            .zip(&env)
            .enumerate()
            .map(|(n, (v, p))| v - p * Complex64::from_polar(1.0, 2.0 * PI * freq * n as f64))
            .collect()
    } else {
        x.to_vec()
    };
    (cleaned, PilotTrack { phase, snr_db, freq_offset, valid })
}
