use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Root-raised-cosine pulse parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PulseShape {
    pub rolloff: f64,
    pub samples_per_symbol: usize,
    /// Filter length in symbols; even.
    pub filter_span: usize,
}

impl Default for PulseShape {
    fn default() -> Self {
        Self { rolloff: 0.2, samples_per_symbol: 4, filter_span: 8192 }
    }
}

impl PulseShape {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rolloff) {
            return Err(invalid(format!("rolloff {} outside [0, 1]", self.rolloff)));
        }
        if self.samples_per_symbol < 2 {
            return Err(invalid("samples_per_symbol must be at least 2"));
        }
        if self.filter_span == 0 || !self.filter_span.is_multiple_of(2) {
            return Err(invalid("filter_span must be a positive even number of symbols"));
        }
        Ok(())
    }

    pub fn tap_count(&self) -> usize {
        self.filter_span * self.samples_per_symbol + 1
    }

    /// Filter delay in samples (center tap index).
    pub fn delay(&self) -> usize {
        self.filter_span * self.samples_per_symbol / 2
    }
}

/// Continuous RRC impulse response at `t` symbol periods, unnormalized.
fn rrc_value(t: f64, beta: f64) -> f64 {
    if t == 0.0 {
        return 1.0 - beta + 4.0 * beta / PI;
    }
    if beta == 0.0 {
        return (PI * t).sin() / (PI * t);
    }
    let x = 4.0 * beta * t;
    if (1.0 - x * x).abs() < 1e-10 {
        let a = PI / (4.0 * beta);
        return beta * FRAC_1_SQRT_2 * ((1.0 + 2.0 / PI) * a.sin() + (1.0 - 2.0 / PI) * a.cos());
    }
    let num = (PI * t * (1.0 - beta)).sin() + x * (PI * t * (1.0 + beta)).cos();
    num / (PI * t * (1.0 - x * x))
}

/// RRC taps of length `span·sps + 1`, scaled to unit energy.
pub fn rrc_taps(shape: &PulseShape) -> Result<Vec<f64>> {
    shape.validate()?;
    let sps = shape.samples_per_symbol as f64;
    let half = shape.delay() as f64;
    let mut taps: Vec<f64> = (0..shape.tap_count())
        .map(|n| rrc_value((n as f64 - half) / sps, shape.rolloff))
        .collect();
    let energy: f64 = taps.iter().map(|h| h * h).sum();
    let s = energy.sqrt().recip();
    for h in taps.iter_mut() {
        *h *= s;
    }
    Ok(taps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_points_use_limits() {
        // Neighbors of t = 1/(4β) approach the limit value continuously.
        let beta = 0.25;
        let at = rrc_value(1.0, beta);
        let near = rrc_value(1.0 + 1e-7, beta);
        assert!((at - near).abs() < 1e-6);
        let zero = rrc_value(0.0, beta);
        assert!((zero - rrc_value(1e-9, beta)).abs() < 1e-6);
    }

    #[test]
    fn taps_are_symmetric() {
        let s = PulseShape { rolloff: 0.35, samples_per_symbol: 4, filter_span: 16 };
        let h = rrc_taps(&s).unwrap();
        for i in 0..h.len() {
            assert_eq!(h[i], h[h.len() - 1 - i]);
        }
    }
}
