use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, SweepConfig, SweepMode, TrustMode};
use super::pipeline::{key_length, nominal_link, run_pipeline, SummaryRow};
use crate::channel::transmittance;
use crate::error::{Error, Result};
use crate::estimation::{compute_skr, ChannelEstimate, FiniteSize, NoiseTrust};
use crate::rng::derive_seed;

/// Sweep output: rows ordered by (axis value, repetition).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub parameter: String,
    pub values: Vec<f64>,
    pub rows: Vec<SummaryRow>,
    /// Axis value with the largest mean finite-size key rate.
    pub argmax: Option<f64>,
}

/// The estimate an infinitely repeated experiment would centre on: point
/// values from the nominal link and the finite-size spreads for the
/// configured number of disclosed values.
pub fn expected_estimate(cfg: &ExperimentConfig) -> ChannelEstimate {
    let (t, sigma2) = nominal_link(cfg);
    let vps = match cfg.detector.kind {
        crate::channel::DetectionKind::Heterodyne => 2.0,
        crate::channel::DetectionKind::Homodyne => 1.0,
    };
    let e = &cfg.estimation;
    let values = cfg.frame.payload_symbols as f64 * vps;
    let m = if e.reversed_order { values } else { (values * e.disclosed_fraction).round() };
    let sd_t = (sigma2 / (m * cfg.modulation.variance)).sqrt();
    let sd_sigma2 = sigma2 * (2.0 / m).sqrt();
    let z = e.quantile_convention.z(e.epsilon_pe);
    let floor = cfg.detector.kind.vacuum_constant() * (1.0 + cfg.detector.electronic_noise_nu_el);
    let (t_min, t_max) = (t - z * sd_t, t + z * sd_t);
    let sigma2_max = sigma2 + z * sd_sigma2;
    ChannelEstimate {
        t_hat: t,
        sigma2_hat: sigma2,
        xi_hat: (sigma2 - floor) / (t * t),
        sd_t,
        sd_sigma2,
        t_min,
        sigma2_max,
        epsilon_pe: e.epsilon_pe,
        m_disclosed: m as usize,
        quantile_convention: e.quantile_convention,
        xi_min: (sigma2 - z * sd_sigma2 - floor) / (t_max * t_max),
        xi_max: if t_min > 0.0 { (sigma2_max - floor) / (t_min * t_min) } else { f64::INFINITY },
        sub_vacuum: sigma2 < floor,
    }
}

/// Key-rate formulas at the configured parameters, without simulation.
pub fn analytic_point(cfg: &ExperimentConfig) -> Result<SummaryRow> {
    let start = Instant::now();
    let est = expected_estimate(cfg);
    let trust = match (cfg.estimation.noise_trust, cfg.calibration.method) {
        (TrustMode::Untrusted, _) | (TrustMode::Auto, crate::calibration::CalibrationMethod::OneTime) => NoiseTrust::Untrusted,
        _ => NoiseTrust::Trusted { nu_el: cfg.detector.electronic_noise_nu_el },
    };
    let frac = if cfg.estimation.reversed_order { 0.0 } else { cfg.estimation.disclosed_fraction };
    let n_key = ((1.0 - frac) * cfg.frame.payload_symbols as f64) as usize;
    let finite = FiniteSize { disclosed_fraction: frac, n_key, epsilon_h: cfg.privacy.epsilon_h, penalty_in_rate: cfg.privacy.penalty_in_rate };
    let sec = if est.t_min > 0.0 {
        Some(compute_skr(&est, cfg.modulation.variance, &cfg.detector, cfg.reconciliation.beta, cfg.reconciliation.direction, trust, &finite)?)
    } else {
        None
    };
    let skr = sec.map_or(f64::NEG_INFINITY, |s| s.skr_finite);
    let bits = key_length(skr, cfg.frame.payload_symbols as f64, cfg);
    let nan = f64::NAN;
    Ok(SummaryRow {
        distance_km: cfg.channel.distance_km,
        t_true: transmittance(&cfg.channel),
        xi_true: cfg.channel.excess_noise_xi,
        t_hat: est.t_hat,
        xi_hat: est.xi_hat,
        t_min: est.t_min,
        sigma2_max: est.sigma2_max,
        i_ab: sec.map_or(nan, |s| s.mutual_info_bits_per_symbol),
        chi: sec.map_or(nan, |s| s.holevo_bound_bits),
        skr_asym: sec.map_or(f64::NEG_INFINITY, |s| s.skr_asymptotic),
        skr_finite: skr,
        beta: cfg.reconciliation.beta,
        fer: None,
        final_key_bits: bits,
        wallclock_s: start.elapsed().as_secs_f64(),
    })
}

/// Evaluates every (value, repetition) point in parallel. Repetition `r`
/// of point `i` uses seed `derive_seed(cfg.seed, i·reps + r)`.
pub fn sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let spec: &SweepConfig = cfg.sweep.as_ref().ok_or_else(|| Error::Config("no [sweep] block".into()))?;
    let reps = if spec.mode == SweepMode::Analytic { 1 } else { cfg.repetitions };
    let jobs: Vec<(usize, usize)> = (0..spec.values.len()).flat_map(|i| (0..reps).map(move |r| (i, r))).collect();
    let rows: Vec<SummaryRow> = jobs
        .par_iter()
        .map(|&(i, r)| {
            let mut point = cfg.with_parameter(&spec.parameter, spec.values[i])?;
            point.seed = derive_seed(cfg.seed, (i * reps + r) as u64);
            point.sweep = None;
            match spec.mode {
                SweepMode::Analytic => analytic_point(&point),
                SweepMode::Simulate => Ok(run_pipeline(&point)?.summary),
            }
        })
        .collect::<Result<_>>()?;
    let mut best: Option<(f64, f64)> = None;
    for (i, v) in spec.values.iter().enumerate() {
        let chunk = &rows[i * reps..(i + 1) * reps];
        let mean = chunk.iter().map(|r| r.skr_finite).sum::<f64>() / reps as f64;
        if mean.is_finite() && best.is_none_or(|(_, b)| mean > b) {
            best = Some((*v, mean));
        }
    }
    Ok(SweepReport { parameter: spec.parameter.clone(), values: spec.values.clone(), rows, argmax: best.map(|b| b.0) })
}

/// Writes the rows as CSV (comma-separated, header, LF line endings).
pub fn write_csv(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Line chart of the mean finite-size and asymptotic key rates against
/// the swept parameter. Non-positive rates are drawn at zero.
pub fn svg_chart(report: &SweepReport) -> String {
    let (w, h, pad) = (640.0, 400.0, 60.0);
    let reps = report.rows.len() / report.values.len().max(1);
    let series = |f: fn(&SummaryRow) -> f64| -> Vec<(f64, f64)> {
        report
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let chunk = &report.rows[i * reps..(i + 1) * reps];
                let m = chunk.iter().map(f).sum::<f64>() / reps as f64;
                (*v, if m.is_finite() { m.max(0.0) } else { 0.0 })
            })
            .collect()
    };
    let finite = series(|r| r.skr_finite);
    let asym = series(|r| r.skr_asym);
    let (x0, x1) = report.values.iter().fold((f64::MAX, f64::MIN), |(a, b), v| (a.min(*v), b.max(*v)));
    let y1 = finite.iter().chain(&asym).map(|p| p.1).fold(0.0, f64::max).max(1e-12);
    let sx = |x: f64| if x1 > x0 { pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad) } else { w / 2.0 };
    let sy = |y: f64| h - pad - y / y1 * (h - 2.0 * pad);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{pad} {pad} V{} H{}" fill="none" stroke="black"/>"#,
        h - pad,
        w - pad
    );
    for (pts, color, label) in [(&asym, "#999999", "asymptotic"), (&finite, "#1f77b4", "finite-size")] {
        let d: Vec<String> = pts.iter().map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"><title>{label}</title></polyline>"#, d.join(" "));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, h - 15.0, report.parameter);
    let _ = writeln!(s, r#"<text x="15" y="{}" font-size="14" transform="rotate(-90 15 {})">SKR (bits/symbol)</text>"#, h / 2.0, h / 2.0);
    let _ = writeln!(s, r#"<text x="{pad}" y="{}" font-size="11">{x0}</text><text x="{}" y="{}" font-size="11" text-anchor="end">{x1}</text>"#, h - pad + 16.0, w - pad, h - pad + 16.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{y1:.3e}</text>"#, pad - 4.0, pad + 4.0);
    s.push_str("</svg>\n");
    s
}
