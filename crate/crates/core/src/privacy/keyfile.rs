use std::io::{Read, Write};
use std::path::Path;

use crate::error::{invalid, Result};

/// Packs 0/1 values LSB-first into bytes.
pub fn pack_bits(bits: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        out[i / 8] |= (b & 1) << (i % 8);
    }
    out
}

/// Inverse of [`pack_bits`].
pub fn unpack_bits(bytes: &[u8], n: usize) -> Vec<u8> {
    (0..n).map(|i| (bytes[i / 8] >> (i % 8)) & 1).collect()
}

/// Writes a bit file: u64 little-endian bit count, then LSB-first packed bits.
pub fn write_bit_file(path: &Path, bits: &[u8]) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(&(bits.len() as u64).to_le_bytes())?;
    f.write_all(&pack_bits(bits))?;
    Ok(())
}

pub fn read_bit_file(path: &Path) -> Result<Vec<u8>> {
    let mut raw = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut raw)?;
    if raw.len() < 8 {
        return Err(invalid("bit file shorter than its header"));
    }
    let n = u64::from_le_bytes(raw[..8].try_into().unwrap()) as usize;
    if raw.len() != 8 + n.div_ceil(8) {
        return Err(invalid("bit file length does not match its header"));
    }
    Ok(unpack_bits(&raw[8..], n))
}
