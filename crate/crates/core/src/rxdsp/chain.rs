use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fixed_point::{quantize_complex, FixedPoint};
use super::phase::{equalize, one_tap_estimate, pilot_phase_correct};
use super::pilot::{extract_pilot, PilotConfig, PilotTrack};
use super::sync::{frame_sync, DEFAULT_SYNC_THRESHOLD};
use super::timing::{gardner_recover, resample, GardnerConfig};
use crate::calibration::CalibrationRecord;
use crate::channel::{dispersion, ChannelParams, QuadratureRecord, Units};
use crate::error::{Error, Result};
use crate::signal;
use crate::txdsp::{rrc_taps, zadoff_chu, FrameLayout, PulseShape};

/// Receiver configuration. Each stage can be bypassed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RxConfig {
    pub cd_compensation: bool,
    pub pilot_separation: bool,
    pub timing_recovery: bool,
    pub frame_sync: bool,
    pub phase_correction: bool,
    pub equalizer: bool,
    pub pilot: PilotConfig,
    pub timing: GardnerConfig,
    pub sync_threshold: f64,
    /// When the preamble is not found, continue at the nominal frame
    /// position instead of failing; the report flags the miss.
    pub sync_fallback: bool,
    /// Quantization applied at every inter-stage boundary.
    pub fixed_point: Option<FixedPoint>,
    /// Directory for per-stage .iq dumps.
    pub stage_taps: Option<PathBuf>,
}

impl Default for RxConfig {
    fn default() -> Self {
        Self {
            cd_compensation: true,
            pilot_separation: true,
            timing_recovery: true,
            frame_sync: true,
            phase_correction: true,
            equalizer: true,
            pilot: PilotConfig::default(),
            timing: GardnerConfig::default(),
            sync_threshold: DEFAULT_SYNC_THRESHOLD,
            sync_fallback: true,
            fixed_point: None,
            stage_taps: None,
        }
    }
}

impl RxConfig {
    /// Every stage bypassed and no quantization.
    pub fn bypass_all() -> Self {
        Self {
            cd_compensation: false,
            pilot_separation: false,
            timing_recovery: false,
            frame_sync: false,
            phase_correction: false,
            equalizer: false,
            ..Self::default()
        }
    }
}

/// Per-frame receiver diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DspReport {
    /// Fraction of a symbol.
    pub estimated_timing_offset: f64,
    /// Cycles/sample.
    pub estimated_freq_offset: f64,
    /// rad².
    pub residual_phase_var: f64,
    pub frame_start_index: usize,
    pub pilot_snr_db: f64,
    pub equalizer_gain: Complex64,
    pub timing_converged: bool,
    pub phase_corrected: bool,
    pub sync_psr: f64,
    pub sync_found: bool,
    pub fine_sync_offset: f64,
}

impl Default for DspReport {
    fn default() -> Self {
        Self {
            estimated_timing_offset: 0.0,
            estimated_freq_offset: 0.0,
            residual_phase_var: 0.0,
            frame_start_index: 0,
            pilot_snr_db: f64::NAN,
            equalizer_gain: Complex64::new(1.0, 0.0),
            timing_converged: true,
            phase_corrected: false,
            sync_psr: f64::NAN,
            sync_found: false,
            fine_sync_offset: 0.0,
        }
    }
}

/// Payload quadratures at symbol rate (still in ADC units) plus diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct RxOutput {
    pub payload: QuadratureRecord,
    pub report: DspReport,
}

/// Undoes the fiber's dispersion with the nominal link parameters.
pub fn cd_compensate(x: &[Complex64], c: &ChannelParams, sps: usize) -> Vec<Complex64> {
    dispersion(x, c, sps, 1.0)
}

fn check_pilot_band(layout: &FrameLayout, shape: &PulseShape, cutoff: f64) -> Result<()> {
    let (lo, hi) = layout.signal_band(shape, (1.0 + shape.rolloff) / 2.0);
    let p = layout.pilot_frequency;
    if p + cutoff >= lo && p - cutoff <= hi {
        return Err(Error::SpectralOverlap { pilot: p, lo, hi });
    }
    Ok(())
}

/// Separates the pilot (when present), mixes the signal band to baseband
/// and applies the normalized matched filter. The output stays at `sps`
/// samples per symbol, aligned with the input.
pub fn downconvert_matched_filter(
    x: &[Complex64],
    layout: &FrameLayout,
    shape: &PulseShape,
    pilot: Option<&PilotConfig>,
) -> Result<(Vec<Complex64>, Option<PilotTrack>)> {
    let (clean, track) = match pilot {
        Some(cfg) => {
            check_pilot_band(layout, shape, cfg.cutoff)?;
            let (c, t) = extract_pilot(x, layout.pilot_frequency, cfg);
            (c, Some(t))
        }
        None => (x.to_vec(), None),
    };
    Ok((matched_filter(&signal::mix(&clean, -layout.carrier_offset), shape)?, track))
}

fn matched_filter(x: &[Complex64], shape: &PulseShape) -> Result<Vec<Complex64>> {
    let g = 1.0 / (shape.samples_per_symbol as f64).sqrt();
    let taps: Vec<f64> = rrc_taps(shape)?.into_iter().map(|h| h * g).collect();
    Ok(signal::filter_centered(x, &taps))
}

/// Divides by √SNU and tags the record as SNU-normalized.
pub fn snu_normalize(record: &QuadratureRecord, cal: &CalibrationRecord) -> Result<QuadratureRecord> {
    cal.validate()?;
    if record.units == Units::Snu {
        return Err(Error::Calibration("record is already normalized".into()));
    }
    let g = 1.0 / cal.snu_value.sqrt();
    Ok(QuadratureRecord {
        samples: record.samples.iter().map(|v| v * g).collect(),
        units: Units::Snu,
        ..record.clone()
    })
}

struct Stages<'a> {
    fixed_point: Option<&'a FixedPoint>,
    taps: Option<&'a Path>,
    count: usize,
}

impl Stages<'_> {
    fn boundary(&mut self, name: &str, x: &mut [Complex64], sps: usize) -> Result<()> {
        if let Some(f) = self.fixed_point {
            quantize_complex(x, f);
        }
        self.count += 1;
        if let Some(dir) = self.taps {
            std::fs::create_dir_all(dir)?;
            signal::write_iq(&dir.join(format!("{:02}_{name}.iq", self.count)), x, sps as u32)?;
        }
        Ok(())
    }
}

/// Runs the receiver chain on a raw record and returns the payload at
/// symbol rate. Records at one sample per symbol take the symbol-level
/// path: only frame sync, phase and equalizer stages apply, and the pilot
/// phase track is unavailable.
pub fn receive(
    record: &QuadratureRecord,
    layout: &FrameLayout,
    shape: &PulseShape,
    channel: &ChannelParams,
    cfg: &RxConfig,
) -> Result<RxOutput> {
    signal::check_finite(&record.samples)?;
    let sps = record.sps;
    let mut stages = Stages { fixed_point: cfg.fixed_point.as_ref(), taps: cfg.stage_taps.as_deref(), count: 0 };
    let mut report = DspReport::default();
    let mut x = record.samples.clone();
    stages.boundary("adc", &mut x, sps)?;

    let (symbols, tau, track, nominal_start) = if sps == 1 {
        (x, 0.0, None, 0)
    } else {
        if cfg.cd_compensation {
            x = cd_compensate(&x, channel, sps);
            stages.boundary("cd", &mut x, sps)?;
        }
        let pilot_cfg = (cfg.pilot_separation && layout.pilot_amplitude > 0.0).then_some(&cfg.pilot);
        let (mut y, track) = downconvert_matched_filter(&x, layout, shape, pilot_cfg)?;
        stages.boundary("mf", &mut y, sps)?;
        let (mut s, tau) = if cfg.timing_recovery {
            let (s, est) = gardner_recover(&y, sps, shape.rolloff, &cfg.timing)?;
            report.timing_converged = est.converged;
            (s, est.tau)
        } else {
            (resample(&y, sps, 0.0, cfg.timing.interp_half_taps), 0.0)
        };
        stages.boundary("timing", &mut s, 1)?;
        report.estimated_timing_offset = tau;
        if let Some(t) = &track {
            report.pilot_snr_db = t.snr_db;
            report.estimated_freq_offset = t.freq_offset;
        }
        (s, tau, track, shape.delay() / sps)
    };

    let frame_len = layout.frame_symbols();
    let start = if cfg.frame_sync {
        let reference = zadoff_chu(layout.sync_length, layout.zc_root)?;
        match frame_sync(&symbols, &reference, cfg.sync_threshold) {
            Ok(r) => {
                report.sync_psr = r.psr;
                report.sync_found = true;
                report.fine_sync_offset = r.fine_offset;
                r.index
            }
            Err(Error::SyncNotFound { psr, .. }) if cfg.sync_fallback => {
                report.sync_psr = psr;
                nominal_start
            }
            Err(e) => return Err(e),
        }
    } else {
        nominal_start
    };
    report.frame_start_index = start;
    if symbols.len() < start + frame_len {
        return Err(Error::LengthMismatch { expected: start + frame_len, actual: symbols.len() });
    }
    let mut frame = symbols[start..start + frame_len].to_vec();

    if cfg.phase_correction {
        if let Some(t) = track.as_ref().filter(|t| t.valid) {
            let positions: Vec<f64> = (start..start + frame_len).map(|k| (k as f64 + tau) * sps as f64).collect();
            let (corrected, var) = pilot_phase_correct(&frame, &positions, t);
            frame = corrected;
            report.residual_phase_var = var;
            report.phase_corrected = true;
        }
    }
    if cfg.equalizer {
        let reference = zadoff_chu(layout.sync_length, layout.zc_root)?;
        let gain = one_tap_estimate(&frame[..layout.sync_length], &reference);
        equalize(&mut frame, gain);
        report.equalizer_gain = gain;
    }
    stages.boundary("equalizer", &mut frame, 1)?;

    let payload = QuadratureRecord {
        samples: frame[layout.sync_length..].to_vec(),
        units: record.units,
        kind: record.kind,
        sps: 1,
        basis: record
            .basis
            .as_ref()
            .map(|b| b[(start + layout.sync_length).min(b.len())..(start + frame_len).min(b.len())].to_vec()),
    };
    Ok(RxOutput { payload, report })
}

/// Symbol-rate noise samples from a calibration record: the same
/// down-conversion, matched filter and quantization boundaries as the data
/// path, decimated away from the filter transients. Heterodyne records
/// yield both quadratures.
pub fn noise_samples(record: &QuadratureRecord, layout: &FrameLayout, shape: &PulseShape, cfg: &RxConfig) -> Result<Vec<f64>> {
    let mut x = record.samples.clone();
    let mut stages = Stages { fixed_point: cfg.fixed_point.as_ref(), taps: None, count: 0 };
    stages.boundary("adc", &mut x, record.sps)?;
    let syms: Vec<Complex64> = if record.sps == 1 {
        x
    } else {
        let sps = record.sps;
        let mut y = matched_filter(&signal::mix(&x, -layout.carrier_offset), shape)?;
        stages.boundary("mf", &mut y, sps)?;
        let skip = shape.tap_count().min(y.len() / 4);
        (skip..y.len() - skip).step_by(sps).map(|i| y[i]).collect()
    };
    Ok(match record.kind {
        crate::channel::DetectionKind::Heterodyne => syms.iter().flat_map(|v| [v.re, v.im]).collect(),
        crate::channel::DetectionKind::Homodyne => syms.iter().map(|v| v.re).collect(),
    })
}
