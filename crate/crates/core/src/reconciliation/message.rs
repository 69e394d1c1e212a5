use crate::error::{invalid, Result};
use crate::privacy::{pack_bits, unpack_bits};

/// Public reconciliation message for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SyndromeMessage {
    pub code_id: u32,
    pub frame_id: u64,
    /// 8 rotation coefficients per block, concatenated.
    pub md_rotation_coefficients: Vec<f64>,
    /// n − k syndrome bits (0/1).
    pub syndrome: Vec<u8>,
    /// crc32 of the sender's reconciled key block, packed LSB-first.
    pub crc32: u32,
}

/// crc32 of a bit block packed LSB-first.
pub fn key_crc(bits: &[u8]) -> u32 {
    crc32fast::hash(&pack_bits(bits))
}

impl SyndromeMessage {
    /// Fixed layout, little-endian: code_id u32, frame_id u64, coefficient
    /// count u32, syndrome length u32, coefficients f64, syndrome bits packed
    /// LSB-first, crc32 u32.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&self.code_id.to_le_bytes());
        out.extend_from_slice(&self.frame_id.to_le_bytes());
        out.extend_from_slice(&(self.md_rotation_coefficients.len() as u32).to_le_bytes());
        out.extend_from_slice(&(self.syndrome.len() as u32).to_le_bytes());
        for c in &self.md_rotation_coefficients {
            out.extend_from_slice(&c.to_le_bytes());
        }
        out.extend_from_slice(&pack_bits(&self.syndrome));
        out.extend_from_slice(&self.crc32.to_le_bytes());
        out
    }

    pub fn from_bytes(raw: &[u8]) -> Result<Self> {
        if raw.len() < 20 {
            return Err(invalid("syndrome message shorter than its header"));
        }
        let u32_at = |i: usize| u32::from_le_bytes(raw[i..i + 4].try_into().unwrap());
        let code_id = u32_at(0);
        let frame_id = u64::from_le_bytes(raw[4..12].try_into().unwrap());
        let n_coeff = u32_at(12) as usize;
        let n_syn = u32_at(16) as usize;
        let syn_bytes = n_syn.div_ceil(8);
        if raw.len() != 20 + 8 * n_coeff + syn_bytes + 4 {
            return Err(invalid("syndrome message length does not match its header"));
        }
        let coeffs = (0..n_coeff)
            .map(|i| f64::from_le_bytes(raw[20 + 8 * i..28 + 8 * i].try_into().unwrap()))
            .collect();
        let s0 = 20 + 8 * n_coeff;
        let syndrome = unpack_bits(&raw[s0..s0 + syn_bytes], n_syn);
        let crc32 = u32_at(s0 + syn_bytes);
        Ok(Self { code_id, frame_id, md_rotation_coefficients: coeffs, syndrome, crc32 })
    }
}
