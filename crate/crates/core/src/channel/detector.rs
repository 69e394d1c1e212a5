use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng::{normal_pair, stream_rng};
use crate::txdsp::Waveform;

/// Coherent detection scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectionKind {
    Homodyne,
    Heterodyne,
}

impl DetectionKind {
    /// Vacuum variance of the estimation-unit data: 1 for homodyne, 2 for
    /// heterodyne after the √2 rescaling.
    pub fn vacuum_constant(self) -> f64 {
        match self {
            DetectionKind::Homodyne => 1.0,
            DetectionKind::Heterodyne => 2.0,
        }
    }
}

/// Quadrature measured by a homodyne detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quadrature {
    Q,
    P,
}

/// Balanced detector, front-end electronics and ADC.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorModel {
    pub kind: DetectionKind,
    pub efficiency_eta: f64,
    /// Electronic noise ν_el in SNU (per quadrature, at nominal LO power).
    pub electronic_noise_nu_el: f64,
    pub adc_bits: u32,
    /// ADC full scale in per-sample shot-noise standard deviations.
    pub adc_fullscale: f64,
    pub quadrature_choice_seed: u64,
    /// Local-oscillator power relative to nominal. Signal and shot noise
    /// scale with it, electronic noise does not.
    pub lo_power: f64,
}

impl Default for DetectorModel {
    fn default() -> Self {
        Self {
            kind: DetectionKind::Heterodyne,
            efficiency_eta: 1.0,
            electronic_noise_nu_el: 0.05,
            adc_bits: 12,
            adc_fullscale: 32.0,
            quadrature_choice_seed: 0,
            lo_power: 1.0,
        }
    }
}

impl DetectorModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.efficiency_eta > 0.0 && self.efficiency_eta <= 1.0) {
            return Err(invalid("efficiency must lie in (0, 1]"));
        }
        if !(self.electronic_noise_nu_el >= 0.0) {
            return Err(invalid("electronic noise must be non-negative"));
        }
        if self.adc_bits < 4 || self.adc_bits > 32 {
            return Err(invalid("adc_bits must lie in [4, 32]"));
        }
        if !(self.adc_fullscale > 0.0) || !(self.lo_power > 0.0) {
            return Err(invalid("adc_fullscale and lo_power must be positive"));
        }
        Ok(())
    }

    /// Analog scale factor mapping per-sample shot-noise units to ADC full
    /// scale fractions.
    fn adc_scale(&self, sps: usize) -> f64 {
        1.0 / (self.adc_fullscale * (sps as f64).sqrt())
    }
}

/// Unit tag of a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Units {
    /// Uncalibrated ADC output, as a fraction of full scale.
    RawAdc,
    /// Normalized to shot-noise units.
    Snu,
}

/// Detected samples. Homodyne records carry the measured value in the real
/// part and the per-symbol basis choices.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRecord {
    pub samples: Vec<Complex64>,
    pub units: Units,
    pub kind: DetectionKind,
    pub sps: usize,
    pub basis: Option<Vec<Quadrature>>,
}

impl QuadratureRecord {
    /// Real-valued view: both quadratures for heterodyne, the measured one
    /// for homodyne.
    pub fn flat(&self) -> Vec<f64> {
        match self.kind {
            DetectionKind::Heterodyne => self.samples.iter().flat_map(|v| [v.re, v.im]).collect(),
            DetectionKind::Homodyne => self.samples.iter().map(|v| v.re).collect(),
        }
    }
}

/// Detector-side truth recorded next to the data for audits.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DetectionTruth {
    pub clip_fraction: f64,
}

/// Homodyne basis choices for `n` symbols from the detector's coin seed.
pub fn basis_choices(d: &DetectorModel, n: usize) -> Vec<Quadrature> {
    let mut rng = stream_rng(d.quadrature_choice_seed, 0xb0b);
    (0..n).map(|_| if rng.gen::<bool>() { Quadrature::P } else { Quadrature::Q }).collect()
}

/// Coherent detection of `wave`. Efficiency is a beam splitter (scale √η,
/// (1−η) vacuum admixture), heterodyne splits the signal with a 1/√2
/// scaling and adds a unit vacuum per quadrature, electronic noise ν_el is
/// added per quadrature, and the result is ADC-quantized.
pub fn detect<R: Rng + ?Sized>(wave: &Waveform, d: &DetectorModel, rng: &mut R) -> Result<(QuadratureRecord, DetectionTruth)> {
    d.validate()?;
    let sps = wave.sps;
    let g_lo = d.lo_power.sqrt();
    let shot_std = g_lo * (sps as f64).sqrt();
    let el_std = (d.electronic_noise_nu_el * sps as f64).sqrt();
    let scale = d.adc_scale(sps);
    let (samples, basis) = match d.kind {
        DetectionKind::Heterodyne => {
            let a = g_lo * (d.efficiency_eta / 2.0).sqrt();
            let s = wave
                .samples
                .iter()
                .map(|v| {
                    let (n1, n2) = normal_pair(rng);
                    let (e1, e2) = normal_pair(rng);
                    let re = a * v.re + shot_std * n1 + el_std * e1;
                    let im = a * v.im + shot_std * n2 + el_std * e2;
                    Complex64::new(re * scale, im * scale)
                })
                .collect();
            (s, None)
        }
        DetectionKind::Homodyne => {
            let a = g_lo * d.efficiency_eta.sqrt();
            let n_sym = wave.samples.len().div_ceil(sps);
            let basis = basis_choices(d, n_sym);
            let s = wave
                .samples
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let x = match basis[i / sps] {
                        Quadrature::Q => v.re,
                        Quadrature::P => v.im,
                    };
                    let (n1, e1) = normal_pair(rng);
                    Complex64::new((a * x + shot_std * n1 + el_std * e1) * scale, 0.0)
                })
                .collect();
            (s, Some(basis))
        }
    };
    let mut rec = QuadratureRecord { samples, units: Units::RawAdc, kind: d.kind, sps, basis };
    let clip = quantize_record(&mut rec, d.adc_bits);
    Ok((rec, DetectionTruth { clip_fraction: clip }))
}

/// ADC-quantizes a raw record in place over [−1, 1]; returns the clip
/// fraction.
pub fn quantize_record(rec: &mut QuadratureRecord, bits: u32) -> f64 {
    let hom = rec.kind == DetectionKind::Homodyne;
    let mut re: Vec<f64> = rec.samples.iter().map(|v| v.re).collect();
    let (q_re, c_re) = adc_quantize(&re, bits, 1.0);
    re = q_re;
    if hom {
        for (v, r) in rec.samples.iter_mut().zip(re) {
            v.re = r;
        }
        return c_re;
    }
    let im: Vec<f64> = rec.samples.iter().map(|v| v.im).collect();
    let (q_im, c_im) = adc_quantize(&im, bits, 1.0);
    for ((v, r), i) in rec.samples.iter_mut().zip(re).zip(q_im) {
        *v = Complex64::new(r, i);
    }
    (c_re + c_im) / 2.0
}

/// Uniform mid-rise quantizer over [−fullscale, fullscale] with saturation.
/// Returns the quantized values and the fraction of inputs beyond full scale.
pub fn adc_quantize(x: &[f64], bits: u32, fullscale: f64) -> (Vec<f64>, f64) {
    let levels = 2f64.powi(bits as i32);
    let step = 2.0 * fullscale / levels;
    let max_idx = levels / 2.0 - 1.0;
    let mut clipped = 0usize;
    let out = x
        .iter()
        .map(|&v| {
            if v.abs() > fullscale {
                clipped += 1;
            }
            let idx = (v / step).floor().clamp(-max_idx - 1.0, max_idx);
            (idx + 0.5) * step
        })
        .collect();
    let frac = if x.is_empty() { 0.0 } else { clipped as f64 / x.len() as f64 };
    (out, frac)
}

/// Record with the LO on and the signal port blocked (vacuum input).
pub fn vacuum_record<R: Rng + ?Sized>(d: &DetectorModel, n: usize, sps: usize, rng: &mut R) -> Result<QuadratureRecord> {
    let wave = Waveform { samples: vec![Complex64::new(0.0, 0.0); n], sps };
    Ok(detect(&wave, d, rng)?.0)
}

/// Record with both the LO and the signal blocked: electronic noise only.
pub fn dark_record<R: Rng + ?Sized>(d: &DetectorModel, n: usize, sps: usize, rng: &mut R) -> Result<QuadratureRecord> {
    d.validate()?;
    let el_std = (d.electronic_noise_nu_el * sps as f64).sqrt();
    let scale = d.adc_scale(sps);
    let samples: Vec<Complex64> = (0..n)
        .map(|_| {
            let (a, b) = normal_pair(rng);
            match d.kind {
                DetectionKind::Heterodyne => Complex64::new(a * el_std * scale, b * el_std * scale),
                DetectionKind::Homodyne => Complex64::new(a * el_std * scale, 0.0),
            }
        })
        .collect();
    let mut rec = QuadratureRecord { samples, units: Units::RawAdc, kind: d.kind, sps, basis: None };
    quantize_record(&mut rec, d.adc_bits);
    Ok(rec)
}
