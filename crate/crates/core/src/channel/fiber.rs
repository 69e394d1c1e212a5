use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng::normal_pair;
use crate::signal;
use crate::txdsp::Waveform;

const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Fiber link and laser parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChannelParams {
    pub distance_km: f64,
    pub attenuation_db_per_km: f64,
    /// Excess noise ξ in SNU, referred to the channel input.
    pub excess_noise_xi: f64,
    /// Combined transmitter and local-oscillator linewidth.
    pub linewidth_hz: f64,
    pub symbol_rate_hz: f64,
    pub cd_ps_per_nm_km: f64,
    pub center_wavelength_nm: f64,
    /// Residual carrier frequency offset, cycles/sample.
    pub freq_offset: f64,
    /// Propagation delay in symbol periods (fractional part matters to the
    /// receiver's clock recovery).
    pub delay_symbols: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            distance_km: 20.0,
            attenuation_db_per_km: 0.2,
            excess_noise_xi: 0.01,
            linewidth_hz: 10e3,
            symbol_rate_hz: 1e9,
            cd_ps_per_nm_km: 20.0,
            center_wavelength_nm: 1550.0,
            freq_offset: 0.0,
            delay_symbols: 0.0,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.distance_km >= 0.0) || !self.distance_km.is_finite() {
            return Err(invalid("distance_km must be finite and non-negative"));
        }
        if !(self.excess_noise_xi >= 0.0) {
            return Err(invalid("excess noise must be non-negative"));
        }
        if !(self.attenuation_db_per_km >= 0.0) {
            return Err(invalid("attenuation must be non-negative"));
        }
        if !(self.linewidth_hz >= 0.0) || !(self.symbol_rate_hz > 0.0) {
            return Err(invalid("linewidth must be non-negative and symbol rate positive"));
        }
        Ok(())
    }

    /// Group-velocity dispersion β₂ in s²/m.
    pub fn beta2(&self) -> f64 {
        let d = self.cd_ps_per_nm_km * 1e-6; // s/m²
        let lambda = self.center_wavelength_nm * 1e-9;
        -d * lambda * lambda / (2.0 * PI * SPEED_OF_LIGHT)
    }

    /// Accumulated dispersion phase coefficient β₂·L/2 in s².
    pub fn cd_phase_coefficient(&self) -> f64 {
        self.beta2() * self.distance_km * 1e3 / 2.0
    }
}

/// T = 10^(−α·L/10).
pub fn transmittance(c: &ChannelParams) -> f64 {
    10f64.powf(-c.attenuation_db_per_km * c.distance_km / 10.0)
}

/// Ground truth of one channel realization. Kept apart from the receiver's
/// data so estimation code never sees it.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ChannelTruth {
    pub transmittance: f64,
    pub excess_noise_xi: f64,
    pub freq_offset: f64,
    pub delay_symbols: f64,
    #[serde(skip)]
    pub phase_trace: Vec<f64>,
}

/// Applies exp(sign·i·β₂·ω²·L/2) with ω the physical angular frequency.
pub(crate) fn dispersion(x: &[Complex64], c: &ChannelParams, sps: usize, sign: f64) -> Vec<Complex64> {
    let k = c.cd_phase_coefficient();
    if k == 0.0 || x.is_empty() {
        return x.to_vec();
    }
    // Circular processing at the exact length keeps the operator unitary;
    // waveforms carry zero-valued filter transients at both ends.
    let fs = c.symbol_rate_hz * sps as f64;
    let n = x.len();
    let mut buf = x.to_vec();
    signal::fft(&mut buf);
    for (i, v) in buf.iter_mut().enumerate() {
        let w = signal::bin_omega(i, n) * fs;
        *v *= Complex64::from_polar(1.0, sign * k * w * w);
    }
    signal::ifft(&mut buf);
    buf
}

/// Propagates a waveform through the fiber: delay, loss √T, input-referred
/// excess noise (per-quadrature variance T·ξ at symbol rate), Wiener phase
/// noise, chromatic dispersion and carrier frequency offset.
pub fn apply_fiber<R: Rng + ?Sized>(wave: &Waveform, c: &ChannelParams, rng: &mut R) -> Result<(Waveform, ChannelTruth)> {
    c.validate()?;
    signal::check_finite(&wave.samples)?;
    let sps = wave.sps;
    let t = transmittance(c);
    let mut x = signal::fractional_delay(&wave.samples, c.delay_symbols * sps as f64);
    let amp = t.sqrt();
    let noise_std = (t * c.excess_noise_xi * sps as f64).sqrt();
    for v in x.iter_mut() {
        *v *= amp;
        if noise_std > 0.0 {
            let (a, b) = normal_pair(rng);
            *v += Complex64::new(a * noise_std, b * noise_std);
        }
    }
    let mut phase_trace = Vec::new();
    if c.linewidth_hz > 0.0 {
        let step = (2.0 * PI * c.linewidth_hz / (c.symbol_rate_hz * sps as f64)).sqrt();
        let mut phi = 0.0;
        phase_trace.reserve(x.len());
        let mut cached: Option<f64> = None;
        for v in x.iter_mut() {
            phase_trace.push(phi);
            *v *= Complex64::from_polar(1.0, phi);
            let g = match cached.take() {
                Some(g) => g,
                None => {
                    let (a, b) = normal_pair(rng);
                    cached = Some(b);
                    a
                }
            };
            phi += step * g;
        }
    }
    let mut x = dispersion(&x, c, sps, -1.0);
    if c.freq_offset != 0.0 {
        x = signal::mix(&x, c.freq_offset);
    }
    let truth = ChannelTruth {
        transmittance: t,
        excess_noise_xi: c.excess_noise_xi,
        freq_offset: c.freq_offset,
        delay_symbols: c.delay_symbols,
        phase_trace,
    };
    Ok((Waveform { samples: x, sps }, truth))
}
