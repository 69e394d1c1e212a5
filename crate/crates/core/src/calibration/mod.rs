//! Shot-noise calibration: the SNU reference in ADC units² and, for the
//! two-time methods, the electronic noise in SNU.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::signal;

/// Default number of vacuum samples per calibration record.
pub const DEFAULT_SAMPLES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationMethod {
    TwoTimePre,
    TwoTimeRealtime,
    OneTime,
}

/// An immutable shot-noise calibration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRecord {
    /// ADC units² per shot-noise unit.
    pub snu_value: f64,
    /// Electronic noise in SNU; absent for the one-time method.
    pub electronic_noise_est: Option<f64>,
    pub method: CalibrationMethod,
    pub sample_count: usize,
    /// LO power the record refers to (realtime tracking only).
    pub lo_power_monitor: Option<f64>,
    pub timestamp_index: u64,
}

impl CalibrationRecord {
    pub fn validate(&self) -> Result<()> {
        if !(self.snu_value > 0.0) || !self.snu_value.is_finite() {
            return Err(Error::Calibration(format!("SNU value {} is not positive and finite", self.snu_value)));
        }
        match (self.method, self.electronic_noise_est) {
            (CalibrationMethod::OneTime, Some(_)) => Err(Error::Calibration("one-time records carry no electronic noise".into())),
            (CalibrationMethod::OneTime, None) => Ok(()),
            (_, Some(v)) if v >= 0.0 => Ok(()),
            _ => Err(Error::Calibration("two-time records need a non-negative electronic noise".into())),
        }
    }

    /// Tags the record with the LO power it was taken at, enabling
    /// realtime rescaling.
    pub fn with_lo_reference(mut self, power: f64) -> Self {
        self.lo_power_monitor = Some(power);
        self
    }

    /// Whether electronic noise may be treated as trusted downstream.
    pub fn trusts_electronic_noise(&self) -> bool {
        self.electronic_noise_est.is_some()
    }
}

fn sample_variance(x: &[f64]) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::Calibration("calibration needs at least two samples".into()));
    }
    let v = signal::variance(x);
    if !v.is_finite() {
        return Err(Error::Calibration("non-finite calibration samples".into()));
    }
    Ok(v)
}

/// Two-time calibration from the two measured variances.
pub fn two_time_from_variances(var_dark: f64, var_lo: f64, sample_count: usize) -> Result<CalibrationRecord> {
    if !(var_lo > var_dark) || var_dark < 0.0 {
        return Err(Error::Calibration(format!(
            "LO variance {var_lo} does not exceed dark variance {var_dark}"
        )));
    }
    let snu = var_lo - var_dark;
    Ok(CalibrationRecord {
        snu_value: snu,
        electronic_noise_est: Some(var_dark / snu),
        method: CalibrationMethod::TwoTimePre,
        sample_count,
        lo_power_monitor: None,
        timestamp_index: 0,
    })
}

/// Pre-calibration from a dark record (signal and LO blocked) and a
/// vacuum record (LO on, signal blocked).
pub fn calibrate_two_time_pre(dark: &[f64], lo: &[f64]) -> Result<CalibrationRecord> {
    two_time_from_variances(sample_variance(dark)?, sample_variance(lo)?, lo.len())
}

/// Rescales a calibration to the monitored LO power. The shot noise scales
/// with the LO while the electronic noise stays fixed in ADC units.
pub fn calibrate_realtime(pre: &CalibrationRecord, lo_monitor_power: f64) -> Result<CalibrationRecord> {
    if !(lo_monitor_power > 0.0) || !lo_monitor_power.is_finite() {
        return Err(invalid(format!("LO monitor power {lo_monitor_power} must be positive")));
    }
    pre.validate()?;
    let reference = pre.lo_power_monitor.unwrap_or(1.0);
    let ratio = lo_monitor_power / reference;
    Ok(CalibrationRecord {
        snu_value: pre.snu_value * ratio,
        electronic_noise_est: pre.electronic_noise_est.map(|v| v / ratio),
        method: match pre.method {
            CalibrationMethod::OneTime => CalibrationMethod::OneTime,
            _ => CalibrationMethod::TwoTimeRealtime,
        },
        sample_count: pre.sample_count,
        lo_power_monitor: Some(lo_monitor_power),
        timestamp_index: pre.timestamp_index + 1,
    })
}

/// One-time calibration: the total noise of an LO-only record is taken as
/// the reference and electronic noise is left to the channel.
pub fn calibrate_one_time(total: &[f64]) -> Result<CalibrationRecord> {
    let v = sample_variance(total)?;
    // Round-off leaves a residue of order ε·x² on a constant record.
    let power = total.iter().map(|x| x * x).sum::<f64>() / total.len() as f64;
    if v <= 1e-12 * power || v == 0.0 {
        return Err(Error::Calibration("total-noise record has zero variance".into()));
    }
    Ok(CalibrationRecord {
        snu_value: v,
        electronic_noise_est: None,
        method: CalibrationMethod::OneTime,
        sample_count: total.len(),
        lo_power_monitor: None,
        timestamp_index: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let r = two_time_from_variances(0.2, 1.2, 10).unwrap();
        assert!((r.snu_value - 1.0).abs() < 1e-12);
        assert!((r.electronic_noise_est.unwrap() - 0.2).abs() < 1e-12);
        let r = two_time_from_variances(0.0, 3.0, 10).unwrap();
        assert_eq!(r.snu_value, 3.0);
        assert_eq!(r.electronic_noise_est, Some(0.0));
        assert!(two_time_from_variances(1.0, 1.0, 10).is_err());
    }

    #[test]
    fn realtime_scaling() {
        let pre = two_time_from_variances(0.2, 1.2, 10).unwrap().with_lo_reference(1.0);
        let same = calibrate_realtime(&pre, 1.0).unwrap();
        assert_eq!(same.snu_value, pre.snu_value);
        assert_eq!(same.electronic_noise_est, pre.electronic_noise_est);
        let double = calibrate_realtime(&pre, 2.0).unwrap();
        assert!((double.snu_value - 2.0).abs() < 1e-12);
        assert!((double.electronic_noise_est.unwrap() - 0.1).abs() < 1e-12);
        assert!(calibrate_realtime(&pre, 0.0).is_err());
    }
}
