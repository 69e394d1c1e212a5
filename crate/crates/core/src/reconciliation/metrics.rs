use serde::{Deserialize, Serialize};

use super::frame::FrameStatus;

/// Reconciliation performance summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Performance {
    /// β = R / C(SNR), C = ½·log₂(1 + SNR) per real dimension.
    pub beta: f64,
    pub fer: f64,
    /// Raw bits processed per wall-clock second.
    pub throughput: f64,
    pub frames: usize,
    pub failures: usize,
    pub crc_mismatches: usize,
}

/// Capacity of the real AWGN channel per dimension.
pub fn awgn_capacity(snr: f64) -> f64 {
    0.5 * (1.0 + snr).log2()
}

/// β, FER and throughput over a run of frames.
pub fn measure_performance(statuses: &[FrameStatus], rate: f64, snr: f64, bits_processed: usize, elapsed_s: f64) -> Performance {
    let frames = statuses.len();
    let failures = statuses.iter().filter(|s| **s != FrameStatus::Success).count();
    let crc_mismatches = statuses.iter().filter(|s| **s == FrameStatus::CrcMismatch).count();
    let fer = if frames == 0 { 0.0 } else { failures as f64 / frames as f64 };
    let throughput = if elapsed_s > 0.0 { bits_processed as f64 / elapsed_s } else { f64::INFINITY };
    Performance { beta: rate / awgn_capacity(snr), fer, throughput, frames, failures, crc_mismatches }
}
