use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::rrc::{rrc_taps, PulseShape};
use super::zadoff_chu::zadoff_chu;
use crate::error::{invalid, Error, Result};
use crate::rng::{complex_normal, stream_rng, Stream};
use crate::signal;

/// Gaussian modulation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationParams {
    /// Per-quadrature modulation variance V_A, in SNU.
    pub variance: f64,
    pub symbol_count: usize,
    pub rng_seed: u64,
}

/// Frame structure: ZC preamble, payload, pilot tone and up-conversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FrameLayout {
    pub sync_length: usize,
    pub zc_root: usize,
    /// Pilot tone frequency, cycles/sample.
    pub pilot_frequency: f64,
    /// Pilot amplitude relative to the per-quadrature signal RMS √V_A, so
    /// the pilot power is `pilot_amplitude²` times the signal power.
    pub pilot_amplitude: f64,
    /// Preamble symbol amplitude relative to √V_A.
    pub sync_amplitude: f64,
    pub payload_symbols: usize,
    /// Digital up-conversion frequency, cycles/sample.
    pub carrier_offset: f64,
}

impl Default for FrameLayout {
    fn default() -> Self {
        Self {
            sync_length: 64,
            zc_root: 1,
            pilot_frequency: 0.35,
            pilot_amplitude: 20.0,
            sync_amplitude: 4.0,
            payload_symbols: 100_000,
            carrier_offset: 0.125,
        }
    }
}

impl FrameLayout {
    pub fn validate(&self) -> Result<()> {
        if !(self.pilot_frequency > 0.0 && self.pilot_frequency < 0.5) {
            return Err(invalid(format!("pilot_frequency {} outside (0, 0.5)", self.pilot_frequency)));
        }
        if self.pilot_amplitude < 0.0 || self.sync_amplitude <= 0.0 {
            return Err(invalid("pilot/sync amplitudes must be non-negative and positive"));
        }
        if self.payload_symbols == 0 {
            return Err(invalid("payload_symbols must be positive"));
        }
        zadoff_chu(self.sync_length, self.zc_root)?;
        Ok(())
    }

    pub fn frame_symbols(&self) -> usize {
        self.sync_length + self.payload_symbols
    }

    /// The up-converted signal band edges (cycles/sample) at the given
    /// relative spectral extent: 0.5 is the −3 dB edge, (1+β)/2 the full band.
    pub fn signal_band(&self, shape: &PulseShape, extent: f64) -> (f64, f64) {
        let half = extent / shape.samples_per_symbol as f64;
        (self.carrier_offset - half, self.carrier_offset + half)
    }
}

/// Oversampled complex baseband waveform.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub samples: Vec<Complex64>,
    pub sps: usize,
}

/// `n` i.i.d. complex Gaussians with per-quadrature variance `variance`,
/// drawn from `rng`.
pub fn gaussian_symbols<R: Rng + ?Sized>(rng: &mut R, variance: f64, n: usize) -> Result<Vec<Complex64>> {
    if !variance.is_finite() || variance < 0.0 {
        return Err(invalid(format!("modulation variance {variance} must be finite and non-negative")));
    }
    Ok((0..n).map(|_| complex_normal(rng, variance)).collect())
}

/// Alice's Gaussian symbols for `p`, from the modulation stream of its seed.
pub fn generate_symbols(p: &ModulationParams) -> Result<Vec<Complex64>> {
    if p.symbol_count == 0 {
        return Err(invalid("symbol_count must be at least 1"));
    }
    let mut rng = stream_rng(p.rng_seed, Stream::Modulation as u64);
    gaussian_symbols(&mut rng, p.variance, p.symbol_count)
}

/// Upsamples and pulse-shapes symbols (full convolution, gain √sps so the
/// per-sample power equals the symbol power).
pub fn shape_symbols(symbols: &[Complex64], shape: &PulseShape) -> Result<Vec<Complex64>> {
    let taps = rrc_taps(shape)?;
    let sps = shape.samples_per_symbol;
    let mut up = vec![Complex64::new(0.0, 0.0); symbols.len() * sps];
    let g = (sps as f64).sqrt();
    for (k, s) in symbols.iter().enumerate() {
        up[k * sps] = s * g;
    }
    Ok(signal::convolve(&up, &taps))
}

/// The ZC preamble as transmitted, before pulse shaping.
pub fn preamble_symbols(layout: &FrameLayout, variance: f64) -> Result<Vec<Complex64>> {
    let a = layout.sync_amplitude * variance.sqrt();
    Ok(zadoff_chu(layout.sync_length, layout.zc_root)?.into_iter().map(|z| z * a).collect())
}

/// Builds `[shaped ZC preamble ‖ shaped payload]`, up-converted by the
/// carrier offset, with the pilot tone added. Symbol `k` of the frame is
/// centered on sample `k·sps + span·sps/2`.
pub fn build_frame(symbols: &[Complex64], variance: f64, shape: &PulseShape, layout: &FrameLayout) -> Result<Waveform> {
    layout.validate()?;
    shape.validate()?;
    if symbols.len() != layout.payload_symbols {
        return Err(Error::LengthMismatch { expected: layout.payload_symbols, actual: symbols.len() });
    }
    let (lo, hi) = layout.signal_band(shape, 0.5);
    let p = layout.pilot_frequency;
    if layout.pilot_amplitude > 0.0 && p >= lo && p <= hi {
        return Err(Error::SpectralOverlap { pilot: p, lo, hi });
    }
    let mut frame = preamble_symbols(layout, variance)?;
    frame.extend_from_slice(symbols);
    let shaped = shape_symbols(&frame, shape)?;
    let pilot = layout.pilot_amplitude * (2.0 * variance).sqrt();
    let samples = shaped
        .iter()
        .enumerate()
        .map(|(n, v)| {
            let n = n as f64;
            v * Complex64::from_polar(1.0, 2.0 * PI * layout.carrier_offset * n)
                + Complex64::from_polar(pilot, 2.0 * PI * p * n)
        })
        .collect();
    Ok(Waveform { samples, sps: shape.samples_per_symbol })
}

/// Sample range `[start, end)` of the payload's steady-state section.
pub fn payload_samples(shape: &PulseShape, layout: &FrameLayout) -> (usize, usize) {
    let sps = shape.samples_per_symbol;
    let start = shape.delay() + layout.sync_length * sps;
    (start, start + layout.payload_symbols * sps)
}
