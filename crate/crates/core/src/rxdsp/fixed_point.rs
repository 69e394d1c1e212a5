use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Rounding applied when dropping fractional bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Rounding {
    #[default]
    NearestEven,
    Truncate,
}

/// Two's-complement fixed-point format with `fraclen` fractional bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub wordlen: u32,
    pub fraclen: u32,
    #[serde(default)]
    pub rounding: Rounding,
}

impl FixedPoint {
    pub fn new(wordlen: u32, fraclen: u32, rounding: Rounding) -> Result<Self> {
        let f = Self { wordlen, fraclen, rounding };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if !(4..=32).contains(&self.wordlen) || self.fraclen >= self.wordlen {
            return Err(invalid(format!(
                "fixed-point format {}:{} needs 4 ≤ wordlen ≤ 32 and fraclen < wordlen",
                self.wordlen, self.fraclen
            )));
        }
        Ok(())
    }

    /// Parses "wordlen:fraclen".
    pub fn parse(spec: &str) -> Result<Self> {
        let (w, f) = spec.split_once(':').ok_or_else(|| invalid(format!("`{spec}` is not wordlen:fraclen")))?;
        let w = w.trim().parse().map_err(|_| invalid(format!("bad wordlen in `{spec}`")))?;
        let f = f.trim().parse().map_err(|_| invalid(format!("bad fraclen in `{spec}`")))?;
        Self::new(w, f, Rounding::NearestEven)
    }

    pub fn lsb(&self) -> f64 {
        2f64.powi(-(self.fraclen as i32))
    }

    /// Quantizes one value, saturating at the format limits.
    pub fn quantize(&self, x: f64) -> f64 {
        let scale = 2f64.powi(self.fraclen as i32);
        let max = 2f64.powi(self.wordlen as i32 - 1) - 1.0;
        let min = -max - 1.0;
        let v = x * scale;
        let q = match self.rounding {
            Rounding::NearestEven => v.round_ties_even(),
            Rounding::Truncate => v.floor(),
        };
        q.clamp(min, max) / scale
    }
}

/// Fixed-point emulation of a real signal.
pub fn fixed_point_quantize(signal: &[f64], wordlen: u32, fraclen: u32, mode: Rounding) -> Result<Vec<f64>> {
    let f = FixedPoint::new(wordlen, fraclen, mode)?;
    Ok(signal.iter().map(|&x| f.quantize(x)).collect())
}

/// Quantizes both components of a complex signal in place.
pub fn quantize_complex(signal: &mut [Complex64], format: &FixedPoint) {
    for v in signal.iter_mut() {
        *v = Complex64::new(format.quantize(v.re), format.quantize(v.im));
    }
}
