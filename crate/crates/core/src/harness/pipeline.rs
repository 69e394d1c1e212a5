use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, TrustMode};
use crate::calibration::{
    calibrate_one_time, calibrate_realtime, calibrate_two_time_pre, CalibrationMethod, CalibrationRecord,
};
use crate::channel::{
    apply_fiber, dark_record, detect, transmittance, vacuum_record, ChannelParams, ChannelTruth, DetectionKind,
    DetectionTruth, DetectorModel, QuadratureRecord,
};
use crate::error::{Error, Result};
use crate::estimation::{
    compute_skr, estimate_channel, sift, ChannelEstimate, Direction, FiniteSize, NoiseReference, NoiseTrust,
    SecurityResult,
};
use crate::privacy::{final_key_length, toeplitz_extract, write_bit_file, ToeplitzSeed};
use crate::reconciliation::ldpc::{code_by_name, library, LdpcCode};
use crate::reconciliation::{awgn_capacity, measure_performance, reconcile_frames, FrameParams, Performance};
use crate::rng::{stream_rng, Stream};
use crate::rxdsp::{noise_samples, receive, snu_normalize, DspReport, RxConfig};
use crate::txdsp::{build_frame, generate_symbols, preamble_symbols, ModulationParams, Waveform};

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunOutcome {
    Success,
    /// The finite-size key rate was not positive.
    Abort,
    /// Too many frames failed to reconcile.
    ReconciliationFailure,
}

impl RunOutcome {
    /// Process exit code for the CLI.
    pub fn exit_code(self) -> i32 {
        match self {
            RunOutcome::Success => 0,
            RunOutcome::Abort => 2,
            RunOutcome::ReconciliationFailure => 3,
        }
    }
}

/// Reconciliation summary of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconciliationReport {
    pub code: String,
    pub rate: f64,
    pub snr: f64,
    pub performance: Performance,
    pub shared_bits: usize,
}

/// Everything a run measured, as written to `run.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub outcome: RunOutcome,
    pub dsp: DspReport,
    pub calibration: CalibrationRecord,
    pub estimate: Option<ChannelEstimate>,
    pub security: Option<SecurityResult>,
    pub reconciliation: Option<ReconciliationReport>,
    pub final_key_bits: usize,
    pub keys_identical: bool,
    pub wallclock_s: f64,
    pub notes: Vec<String>,
}

/// Simulation ground truth, as written to `truth.json`. Estimation never
/// reads it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunTruth {
    pub channel: ChannelTruth,
    pub detection: DetectionTruth,
}

/// One CSV row per run or sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub distance_km: f64,
    #[serde(rename = "T_true")]
    pub t_true: f64,
    pub xi_true: f64,
    pub t_hat: f64,
    pub xi_hat: f64,
    pub t_min: f64,
    pub sigma2_max: f64,
    #[serde(rename = "I_AB")]
    pub i_ab: f64,
    pub chi: f64,
    pub skr_asym: f64,
    pub skr_finite: f64,
    pub beta: f64,
    #[serde(rename = "FER")]
    pub fer: Option<f64>,
    pub final_key_bits: usize,
    pub wallclock_s: f64,
}

/// A finished run: record, truth and, unless aborted, both final keys.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub record: RunRecord,
    pub truth: RunTruth,
    pub alice_key: Option<Vec<u8>>,
    pub bob_key: Option<Vec<u8>>,
    pub summary: SummaryRow,
}

fn values_per_symbol(kind: DetectionKind) -> usize {
    match kind {
        DetectionKind::Heterodyne => 2,
        DetectionKind::Homodyne => 1,
    }
}

/// The receiver configuration actually used: homodyne data take the
/// symbol-level path with only the quantization boundaries active.
fn effective_rx(cfg: &ExperimentConfig) -> RxConfig {
    match cfg.detector.kind {
        DetectionKind::Heterodyne => cfg.receiver.clone(),
        DetectionKind::Homodyne => RxConfig {
            fixed_point: cfg.receiver.fixed_point,
            stage_taps: cfg.receiver.stage_taps.clone(),
            ..RxConfig::bypass_all()
        },
    }
}

/// Homodyne runs use an ideal phase reference: no phase noise, CD,
/// frequency offset or fractional delay at symbol level.
fn effective_channel(cfg: &ExperimentConfig) -> ChannelParams {
    match cfg.detector.kind {
        DetectionKind::Heterodyne => cfg.channel,
        DetectionKind::Homodyne => ChannelParams {
            linewidth_hz: 0.0,
            cd_ps_per_nm_km: 0.0,
            freq_offset: 0.0,
            delay_symbols: 0.0,
            ..cfg.channel
        },
    }
}

/// Runs the configured calibration for records at `sps` samples/symbol.
pub fn run_calibration(cfg: &ExperimentConfig, sps: usize) -> Result<CalibrationRecord> {
    let c = &cfg.calibration;
    let det = DetectorModel { lo_power: c.reference_lo_power, ..cfg.detector };
    let vps = values_per_symbol(det.kind);
    let n_sym = c.samples.div_ceil(vps);
    let n = if sps > 1 { n_sym * sps + 2 * cfg.pulse.tap_count() } else { n_sym };
    let rx = effective_rx(cfg);
    let noise = |r: &QuadratureRecord| noise_samples(r, &cfg.frame, &cfg.pulse, &rx);
    let mut rng = stream_rng(cfg.seed, Stream::Calibration as u64);
    let rec = match c.method {
        CalibrationMethod::OneTime => calibrate_one_time(&noise(&vacuum_record(&det, n, sps, &mut rng)?)?)?,
        method => {
            let dark = noise(&dark_record(&det, n, sps, &mut rng)?)?;
            let lo = noise(&vacuum_record(&det, n, sps, &mut rng)?)?;
            let pre = calibrate_two_time_pre(&dark, &lo)?.with_lo_reference(c.reference_lo_power);
            if method == CalibrationMethod::TwoTimeRealtime {
                calibrate_realtime(&pre, cfg.detector.lo_power)?
            } else {
                pre
            }
        }
    };
    Ok(rec)
}

/// Splits value indices into disclosed and key sets.
fn disclosure(n: usize, fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = stream_rng(seed, Stream::Disclosure as u64);
    idx.shuffle(&mut rng);
    let m = ((n as f64) * fraction).round() as usize;
    let mut disclosed = idx[..m].to_vec();
    let mut key = idx[m..].to_vec();
    disclosed.sort_unstable();
    key.sort_unstable();
    (disclosed, key)
}

fn pick(v: &[f64], idx: &[usize]) -> Vec<f64> {
    idx.iter().map(|&i| v[i]).collect()
}

/// Highest-rate shipped code with R ≤ β·C, preferring longer blocks.
pub fn select_code(snr: f64, beta: f64) -> Option<&'static LdpcCode> {
    let limit = beta * awgn_capacity(snr);
    library()
        .iter()
        .filter(|c| c.rate <= limit + 1e-12)
        .max_by(|a, b| a.rate.total_cmp(&b.rate).then(a.n.cmp(&b.n)))
}

fn trust_for(cfg: &ExperimentConfig, cal: &CalibrationRecord) -> NoiseTrust {
    let measured = cal.electronic_noise_est;
    match (cfg.estimation.noise_trust, measured) {
        (TrustMode::Untrusted, _) | (TrustMode::Auto, None) => NoiseTrust::Untrusted,
        (TrustMode::Auto, Some(nu)) => NoiseTrust::Trusted { nu_el: nu },
        (TrustMode::Trusted, nu) => NoiseTrust::Trusted { nu_el: nu.unwrap_or(cfg.detector.electronic_noise_nu_el) },
    }
}

/// Estimation-unit quantities the configuration predicts: (t, σ²).
pub fn nominal_link(cfg: &ExperimentConfig) -> (f64, f64) {
    let d = &cfg.detector;
    let vac = d.kind.vacuum_constant();
    let t2 = d.efficiency_eta * transmittance(&cfg.channel);
    (t2.sqrt(), vac * (1.0 + d.electronic_noise_nu_el) + t2 * cfg.channel.excess_noise_xi)
}

/// Final key length for `symbols` transmitted symbols' worth of key at
/// rate `skr`. The hashing penalty is taken here unless the rate already
/// carries it.
pub(crate) fn key_length(skr: f64, symbols: f64, cfg: &ExperimentConfig) -> usize {
    let n = symbols.max(0.0).floor() as usize;
    if !cfg.privacy.penalty_in_rate {
        return final_key_length(skr, n, cfg.privacy.epsilon_h);
    }
    if skr > 0.0 {
        (n as f64 * skr).floor() as usize
    } else {
        0
    }
}

fn summary(cfg: &ExperimentConfig, est: Option<&ChannelEstimate>, sec: Option<&SecurityResult>, fer: Option<f64>, bits: usize, wall: f64) -> SummaryRow {
    let nan = f64::NAN;
    SummaryRow {
        distance_km: cfg.channel.distance_km,
        t_true: transmittance(&cfg.channel),
        xi_true: cfg.channel.excess_noise_xi,
        t_hat: est.map_or(nan, |e| e.t_hat),
        xi_hat: est.map_or(nan, |e| e.xi_hat),
        t_min: est.map_or(nan, |e| e.t_min),
        sigma2_max: est.map_or(nan, |e| e.sigma2_max),
        i_ab: sec.map_or(nan, |s| s.mutual_info_bits_per_symbol),
        chi: sec.map_or(nan, |s| s.holevo_bound_bits),
        skr_asym: sec.map_or(nan, |s| s.skr_asymptotic),
        skr_finite: sec.map_or(nan, |s| s.skr_finite),
        beta: sec.map_or(cfg.reconciliation.beta, |s| s.reconciliation_beta),
        fer,
        final_key_bits: bits,
        wallclock_s: wall,
    }
}

struct Reconciled {
    report: ReconciliationReport,
    alice: Vec<u8>,
    bob: Vec<u8>,
}

fn reconcile(cfg: &ExperimentConfig, x: &[f64], y: &[f64], t_hat: f64, sigma2: f64) -> Result<Option<Reconciled>> {
    let r = &cfg.reconciliation;
    let snr = t_hat * t_hat * cfg.modulation.variance / sigma2;
    let code = if r.code == "auto" {
        match select_code(snr, r.beta) {
            Some(c) => c,
            None => return Ok(None),
        }
    } else {
        code_by_name(&r.code)?
    };
    let start = Instant::now();
    let params = FrameParams { t_hat, sigma2, max_iter: r.max_iterations };
    let frames = reconcile_frames(x, y, code, r.direction, &params, cfg.seed)?;
    let statuses: Vec<_> = frames.iter().map(|f| f.status).collect();
    let perf = measure_performance(&statuses, code.rate, snr, frames.len() * code.n, start.elapsed().as_secs_f64());
    let (mut alice, mut bob) = (Vec::new(), Vec::new());
    for f in &frames {
        if let Some(decoded) = f.shared_bits() {
            let (a, b) = match r.direction {
                Direction::Reverse => (decoded, &f.reference_bits[..]),
                Direction::Direct => (&f.reference_bits[..], decoded),
            };
            alice.extend_from_slice(a);
            bob.extend_from_slice(b);
        }
    }
    let report = ReconciliationReport { code: code.name.clone(), rate: code.rate, snr, performance: perf, shared_bits: alice.len() };
    Ok(Some(Reconciled { report, alice, bob }))
}

/// Transmission through detection and receiver DSP. Returns Alice's
/// payload symbols, Bob's payload record, the DSP report and the truth.
fn transmit(cfg: &ExperimentConfig) -> Result<(Vec<Complex64>, QuadratureRecord, DspReport, RunTruth)> {
    let v_a = cfg.modulation.variance;
    let layout = &cfg.frame;
    let symbols = generate_symbols(&ModulationParams {
        variance: v_a,
        symbol_count: layout.payload_symbols,
        rng_seed: cfg.seed,
    })
    .map_err(|e| e.at("txdsp"))?;
    let channel = effective_channel(cfg);
    let wave = match cfg.detector.kind {
        DetectionKind::Heterodyne => build_frame(&symbols, v_a, &cfg.pulse, layout),
        DetectionKind::Homodyne => preamble_symbols(layout, v_a).map(|mut s| {
            s.extend_from_slice(&symbols);
            Waveform { samples: s, sps: 1 }
        }),
    }
    .map_err(|e| e.at("txdsp"))?;
    let mut rng = stream_rng(cfg.seed, Stream::Channel as u64);
    let (wave, channel_truth) = apply_fiber(&wave, &channel, &mut rng).map_err(|e| e.at("channel"))?;
    let mut rng = stream_rng(cfg.seed, Stream::Detector as u64);
    let (rec, detection) = detect(&wave, &cfg.detector, &mut rng).map_err(|e| e.at("detector"))?;
    let out = receive(&rec, layout, &cfg.pulse, &channel, &effective_rx(cfg)).map_err(|e| e.at("rxdsp"))?;
    Ok((symbols, out.payload, out.report, RunTruth { channel: channel_truth, detection }))
}

/// Runs tx → channel → rx → calibration → estimation → (abort?) →
/// reconciliation → privacy amplification. Deterministic in `cfg.seed`.
pub fn run_pipeline(cfg: &ExperimentConfig) -> Result<RunArtifacts> {
    cfg.validate()?;
    let start = Instant::now();
    let mut notes = Vec::new();
    if cfg.detector.kind == DetectionKind::Homodyne {
        notes.push("homodyne: symbol-level path with an ideal phase reference".to_string());
    }
    let (symbols, payload, dsp, truth) = transmit(cfg)?;
    let cal = run_calibration(cfg, if cfg.detector.kind == DetectionKind::Homodyne { 1 } else { cfg.pulse.samples_per_symbol })
        .map_err(|e| e.at("calibration"))?;
    let norm = snu_normalize(&payload, &cal).map_err(|e| e.at("calibration"))?;

    let kind = cfg.detector.kind;
    let bob: Vec<f64> = match kind {
        // Heterodyne values are rescaled so the vacuum reads 2 SNU.
        DetectionKind::Heterodyne => norm.samples.iter().flat_map(|v| [v.re, v.im]).map(|v| v * 2f64.sqrt()).collect(),
        DetectionKind::Homodyne => norm.samples.iter().map(|v| v.re).collect(),
    };
    let (x, y) = sift(&symbols, norm.basis.as_deref(), &bob).map_err(|e| e.at("sifting"))?;

    let est_cfg = &cfg.estimation;
    let trust = trust_for(cfg, &cal);
    let reference = NoiseReference { vacuum: kind.vacuum_constant(), electronic: cal.electronic_noise_est.unwrap_or(0.0) };
    let vps = values_per_symbol(kind) as f64;
    let estimate = |xs: &[f64], ys: &[f64]| match estimate_channel(xs, ys, est_cfg.epsilon_pe, est_cfg.quantile_convention, reference) {
        Ok(e) => Ok(Some(e)),
        Err(Error::UnusableChannel(_)) => Ok(None),
        Err(e) => Err(e.at("estimation")),
    };

    let (kx, ky, est, disclosed) = if est_cfg.reversed_order {
        (x.clone(), y.clone(), None, 0.0)
    } else {
        let (d, k) = disclosure(x.len(), est_cfg.disclosed_fraction, cfg.seed);
        let est = estimate(&pick(&x, &d), &pick(&y, &d))?;
        (pick(&x, &k), pick(&y, &k), est, est_cfg.disclosed_fraction)
    };

    let finish = |outcome, est: Option<ChannelEstimate>, sec: Option<SecurityResult>, rec: Option<Reconciled>, keys: Option<(Vec<u8>, Vec<u8>)>, notes: Vec<String>| {
        let wall = start.elapsed().as_secs_f64();
        let bits = keys.as_ref().map_or(0, |k| k.0.len());
        let identical = keys.as_ref().is_some_and(|(a, b)| a == b);
        let fer = rec.as_ref().map(|r| r.report.performance.fer);
        let summary = summary(cfg, est.as_ref(), sec.as_ref(), fer, bits, wall);
        let (alice_key, bob_key) = match keys {
            Some((a, b)) => (Some(a), Some(b)),
            None => (None, None),
        };
        RunArtifacts {
            record: RunRecord {
                seed: cfg.seed,
                outcome,
                dsp: dsp.clone(),
                calibration: cal,
                estimate: est,
                security: sec,
                reconciliation: rec.map(|r| r.report),
                final_key_bits: bits,
                keys_identical: identical,
                wallclock_s: wall,
                notes,
            },
            truth: truth.clone(),
            alice_key,
            bob_key,
            summary,
        }
    };

    let security = |est: &ChannelEstimate, n_key_values: usize, frac: f64| {
        let finite = FiniteSize {
            disclosed_fraction: frac,
            n_key: (n_key_values as f64 / vps) as usize,
            epsilon_h: cfg.privacy.epsilon_h,
            penalty_in_rate: cfg.privacy.penalty_in_rate,
        };
        compute_skr(est, cfg.modulation.variance, &cfg.detector, cfg.reconciliation.beta, cfg.reconciliation.direction, trust, &finite)
            .map_err(|e| e.at("estimation"))
    };

    // Classic order: estimate, decide, then reconcile.
    let (est, sec, rec) = if !est_cfg.reversed_order {
        let Some(est) = est else {
            notes.push("estimation: channel unusable".into());
            return Ok(finish(RunOutcome::Abort, None, None, None, None, notes));
        };
        let sec = security(&est, kx.len(), disclosed)?;
        if sec.abort {
            return Ok(finish(RunOutcome::Abort, Some(est), Some(sec), None, None, notes));
        }
        let rec = reconcile(cfg, &kx, &ky, est.t_hat, est.sigma2_hat).map_err(|e| e.at("reconciliation"))?;
        (est, sec, rec)
    } else {
        let (t, s2) = nominal_link(cfg);
        let rec = reconcile(cfg, &kx, &ky, t, s2).map_err(|e| e.at("reconciliation"))?;
        let Some(est) = estimate(&x, &y)? else {
            notes.push("estimation: channel unusable".into());
            return Ok(finish(RunOutcome::Abort, None, None, rec, None, notes));
        };
        let sec = security(&est, kx.len(), 0.0)?;
        if sec.abort {
            return Ok(finish(RunOutcome::Abort, Some(est), Some(sec), rec, None, notes));
        }
        (est, sec, rec)
    };

    let Some(rec) = rec else {
        notes.push("reconciliation: no shipped code fits β·C".into());
        return Ok(finish(RunOutcome::ReconciliationFailure, Some(est), Some(sec), None, None, notes));
    };
    if rec.report.performance.fer > cfg.reconciliation.max_fer || rec.alice.is_empty() {
        return Ok(finish(RunOutcome::ReconciliationFailure, Some(est), Some(sec), Some(rec), None, notes));
    }

    // Reconciled values stand for this many transmitted symbols.
    let symbols_equiv = rec.alice.len() as f64 / kx.len() as f64 * cfg.frame.payload_symbols as f64;
    let m_out = key_length(sec.skr_finite, symbols_equiv, cfg).min(rec.alice.len());
    if m_out == 0 {
        notes.push("privacy: finite-size penalty leaves no key".into());
        return Ok(finish(RunOutcome::Abort, Some(est), Some(sec), Some(rec), None, notes));
    }
    let seed = ToeplitzSeed::generate(rec.alice.len(), m_out, cfg.seed).map_err(|e| e.at("privacy"))?;
    let ka = toeplitz_extract(&rec.alice, &seed).map_err(|e| e.at("privacy"))?;
    let kb = toeplitz_extract(&rec.bob, &seed).map_err(|e| e.at("privacy"))?;
    Ok(finish(RunOutcome::Success, Some(est), Some(sec), Some(rec), Some((ka, kb)), notes))
}

/// Writes run.json, truth.json, seed, summary.csv and, unless the run was
/// aborted, alice.key and bob.key.
pub fn write_bundle(dir: &Path, run: &RunArtifacts) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("run.json"), serde_json::to_string_pretty(&run.record)?)?;
    std::fs::write(dir.join("truth.json"), serde_json::to_string_pretty(&run.truth)?)?;
    std::fs::write(dir.join("seed"), format!("{}\n", run.record.seed))?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(dir.join("summary.csv"))?;
    w.serialize(&run.summary)?;
    w.flush()?;
    for name in ["alice.key", "bob.key"] {
        let p = dir.join(name);
        if p.exists() {
            std::fs::remove_file(&p)?;
        }
    }
    if run.record.outcome == RunOutcome::Success {
        if let (Some(a), Some(b)) = (&run.alice_key, &run.bob_key) {
            write_bit_file(&dir.join("alice.key"), a)?;
            write_bit_file(&dir.join("bob.key"), b)?;
        }
    }
    Ok(())
}
