use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

pub const DEFAULT_SYNC_THRESHOLD: f64 = 4.0;

/// Frame synchronization result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncResult {
    /// Symbol index where the preamble starts.
    pub index: usize,
    /// Correlation peak over the RMS of the correlation outside ±2 lags.
    pub psr: f64,
    /// Sub-symbol refinement of the peak from a parabolic fit, in symbols.
    pub fine_offset: f64,
}

/// Locates `reference` in `symbols` by cross-correlation.
pub fn frame_sync(symbols: &[Complex64], reference: &[Complex64], threshold: f64) -> Result<SyncResult> {
    let l = reference.len();
    if l == 0 || symbols.len() < l {
        return Err(invalid(format!("need at least {l} symbols for frame sync, got {}", symbols.len())));
    }
    let lags = symbols.len() - l + 1;
    let mag: Vec<f64> = (0..lags)
        .map(|m| {
            symbols[m..m + l]
                .iter()
                .zip(reference)
                .map(|(s, r)| s * r.conj())
                .sum::<Complex64>()
                .norm()
        })
        .collect();
    let (index, peak) = mag
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::MIN), |best, (i, v)| if v > best.1 { (i, v) } else { best });
    let (mut acc, mut cnt) = (0.0, 0usize);
    for (i, v) in mag.iter().enumerate() {
        if i.abs_diff(index) > 2 {
            acc += v * v;
            cnt += 1;
        }
    }
    let rms = if cnt > 0 { (acc / cnt as f64).sqrt() } else { 0.0 };
    let psr = if rms > 0.0 { peak / rms } else if peak > 0.0 { f64::INFINITY } else { 0.0 };
    if !(psr >= threshold) {
        return Err(Error::SyncNotFound { psr, threshold });
    }
    let fine_offset = if index > 0 && index + 1 < lags {
        let (a, b, c) = (mag[index - 1], mag[index], mag[index + 1]);
        let d = a - 2.0 * b + c;
        if d != 0.0 {
            0.5 * (a - c) / d
        } else {
            0.0
        }
    } else {
        0.0
    };
    Ok(SyncResult { index, psr, fine_offset })
}
