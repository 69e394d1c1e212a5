use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ldpc::{bp_decode, ldpc_syndrome_encode, LdpcCode, LLR_CLIP};
use super::message::{key_crc, SyndromeMessage};
use super::multidim::{bits_to_point, md_project, MdRotation, DIM};
use crate::error::{invalid, Error, Result};
use crate::estimation::Direction;
use crate::rng::{derive_seed, stream_rng, Stream};

/// Channel knowledge used to build the receiver's LLRs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameParams {
    pub t_hat: f64,
    /// Noise variance σ² of Y = tX + Z.
    pub sigma2: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrameStatus {
    Success,
    DecodeFailure,
    CrcMismatch,
}

/// Result of reconciling one frame.
#[derive(Debug, Clone)]
pub struct FrameOutcome {
    pub status: FrameStatus,
    /// The reference side's bits (Bob's in RR, Alice's in DR).
    pub reference_bits: Vec<u8>,
    /// The other side's decoded bits, when decoding converged.
    pub decoded_bits: Option<Vec<u8>>,
    pub message: SyndromeMessage,
    pub iterations: usize,
}

impl FrameOutcome {
    pub fn shared_bits(&self) -> Option<&[u8]> {
        match self.status {
            FrameStatus::Success => self.decoded_bits.as_deref(),
            _ => None,
        }
    }
}

/// Sender side: draws the reference bits, rotates each 8-block onto them
/// and emits the public message.
fn sender<R: Rng + ?Sized>(data: &[f64], code: &LdpcCode, frame_id: u64, rng: &mut R) -> Result<(Vec<u8>, SyndromeMessage)> {
    let bits: Vec<u8> = (0..code.n).map(|_| rng.gen::<bool>() as u8).collect();
    let mut coeffs = Vec::with_capacity(code.n);
    for (block, b) in data.chunks(DIM).zip(bits.chunks(DIM)) {
        let u = bits_to_point(b);
        coeffs.extend_from_slice(&md_project(block, &u)?.coefficients);
    }
    let syndrome = ldpc_syndrome_encode(&bits, code)?;
    let msg = SyndromeMessage {
        code_id: code.id,
        frame_id,
        md_rotation_coefficients: coeffs,
        syndrome,
        crc32: key_crc(&bits),
    };
    Ok((bits, msg))
}

/// Receiver LLRs. The receiver maps its data into the sender's units
/// (RR: t̂·x, DR: y/t̂), rotates each block with the public coefficients and
/// treats the result as the reference point scaled by r̂/√d plus Gaussian
/// noise of variance `noise`. r̂ estimates the sender's block norm: in RR
/// the sender is the noisier side (‖y‖² ≈ ‖w‖² + d·σ²); in DR ‖w‖ itself,
/// since subtracting the noise collapses small blocks to near-zero LLRs.
pub fn receiver_llrs(data: &[f64], coeffs: &[f64], scale: f64, noise: f64, direction: Direction) -> Vec<f64> {
    let d = DIM as f64;
    let mut llr = Vec::with_capacity(data.len());
    for (block, c) in data.chunks(DIM).zip(coeffs.chunks(DIM)) {
        let scaled: Vec<f64> = block.iter().map(|v| v * scale).collect();
        let mut rot = MdRotation { coefficients: [0.0; DIM] };
        rot.coefficients.copy_from_slice(c);
        let w = rot.apply(&scaled);
        let w2: f64 = w.iter().map(|v| v * v).sum();
        let r = match direction {
            Direction::Reverse => (w2 + d * noise).sqrt(),
            Direction::Direct => w2.sqrt(),
        };
        let k = 2.0 * r / (d.sqrt() * noise);
        llr.extend(w.iter().map(|v| (k * v).clamp(-LLR_CLIP, LLR_CLIP)));
    }
    llr
}

/// Reconciles one frame of `code.n` values. In RR Bob is the sender; in DR
/// Alice is.
pub fn reconcile_frame<R: Rng + ?Sized>(
    x_alice: &[f64],
    y_bob: &[f64],
    code: &LdpcCode,
    direction: Direction,
    params: &FrameParams,
    frame_id: u64,
    rng: &mut R,
) -> Result<FrameOutcome> {
    if x_alice.len() != code.n || y_bob.len() != code.n {
        return Err(Error::LengthMismatch { expected: code.n, actual: x_alice.len().min(y_bob.len()) });
    }
    if !(params.t_hat > 0.0 && params.sigma2 > 0.0) {
        return Err(invalid("reconciliation needs t̂ > 0 and σ² > 0"));
    }
    let (send, recv, scale, noise) = match direction {
        Direction::Reverse => (y_bob, x_alice, params.t_hat, params.sigma2),
        Direction::Direct => (x_alice, y_bob, 1.0 / params.t_hat, params.sigma2 / (params.t_hat * params.t_hat)),
    };
    let (reference, msg) = sender(send, code, frame_id, rng)?;
    let llr = receiver_llrs(recv, &msg.md_rotation_coefficients, scale, noise, direction);
    let out = bp_decode(&llr, &msg.syndrome, code, params.max_iter)?;
    let status = match &out.bits {
        None => FrameStatus::DecodeFailure,
        Some(b) if key_crc(b) != msg.crc32 => FrameStatus::CrcMismatch,
        Some(_) => FrameStatus::Success,
    };
    Ok(FrameOutcome { status, reference_bits: reference, decoded_bits: out.bits, message: msg, iterations: out.iterations })
}

/// Splits aligned data into whole frames and reconciles them in parallel.
/// Frame `i` draws its reference bits from a stream derived from
/// `(seed, i)`, so results do not depend on scheduling.
pub fn reconcile_frames(
    x_alice: &[f64],
    y_bob: &[f64],
    code: &LdpcCode,
    direction: Direction,
    params: &FrameParams,
    seed: u64,
) -> Result<Vec<FrameOutcome>> {
    if x_alice.len() != y_bob.len() {
        return Err(Error::LengthMismatch { expected: x_alice.len(), actual: y_bob.len() });
    }
    let frames = x_alice.len() / code.n;
    (0..frames)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(derive_seed(seed, i as u64), Stream::Reconciliation as u64);
            let r = i * code.n..(i + 1) * code.n;
            reconcile_frame(&x_alice[r.clone()], &y_bob[r], code, direction, params, i as u64, &mut rng)
        })
        .collect()
}
