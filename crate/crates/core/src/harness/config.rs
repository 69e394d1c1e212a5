use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::calibration::{CalibrationMethod, DEFAULT_SAMPLES};
use crate::channel::{ChannelParams, DetectorModel};
use crate::error::{Error, Result};
use crate::estimation::{Direction, QuantileConvention};
use crate::reconciliation::ldpc::{code_by_name, DEFAULT_MAX_ITER};
use crate::rxdsp::RxConfig;
use crate::txdsp::{FrameLayout, PulseShape};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModulationConfig {
    /// Per-quadrature modulation variance V_A, SNU.
    pub variance: f64,
}

impl Default for ModulationConfig {
    fn default() -> Self {
        Self { variance: 5.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CalibrationConfig {
    pub method: CalibrationMethod,
    /// Quadrature values per calibration record.
    pub samples: usize,
    /// LO power during the pre-calibration. The data are taken at the
    /// detector's `lo_power`.
    pub reference_lo_power: f64,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self { method: CalibrationMethod::TwoTimePre, samples: DEFAULT_SAMPLES, reference_lo_power: 1.0 }
    }
}

/// Whether detector noise is excluded from Eve's information.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TrustMode {
    /// Trusted when the calibration measured ν_el, untrusted otherwise.
    #[default]
    Auto,
    Trusted,
    Untrusted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimationConfig {
    pub epsilon_pe: f64,
    pub quantile_convention: QuantileConvention,
    /// Fraction of the quadrature values disclosed for estimation.
    pub disclosed_fraction: f64,
    pub noise_trust: TrustMode,
    /// Reconcile first, then estimate on every value.
    pub reversed_order: bool,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        Self {
            epsilon_pe: 1e-10,
            quantile_convention: QuantileConvention::ErfInverse,
            disclosed_fraction: 0.5,
            noise_trust: TrustMode::Auto,
            reversed_order: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReconciliationConfig {
    pub direction: Direction,
    /// Efficiency credited in the key rate.
    pub beta: f64,
    /// Code name, or "auto" for the highest-rate code with R ≤ β·C.
    pub code: String,
    pub max_iterations: usize,
    /// Frame error rate above which the run fails.
    pub max_fer: f64,
}

impl Default for ReconciliationConfig {
    fn default() -> Self {
        Self {
            direction: Direction::Reverse,
            beta: 0.95,
            code: "auto".into(),
            max_iterations: DEFAULT_MAX_ITER,
            max_fer: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PrivacyConfig {
    pub epsilon_h: f64,
    /// Take the hashing penalty out of the rate (true) or out of the final
    /// key length (false).
    pub penalty_in_rate: bool,
}

impl Default for PrivacyConfig {
    fn default() -> Self {
        Self { epsilon_h: 1e-10, penalty_in_rate: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Key-rate formulas at the nominal parameters; no simulation.
    #[default]
    Analytic,
    /// Full pipeline per point and repetition.
    Simulate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    /// Dotted config path, e.g. "channel.distance_km".
    pub parameter: String,
    pub values: Vec<f64>,
    pub mode: SweepMode,
    /// Also write an SVG chart of the key rate against the axis.
    pub chart: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { parameter: "channel.distance_km".into(), values: Vec::new(), mode: SweepMode::Analytic, chart: true }
    }
}

/// Everything a run or sweep needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub repetitions: usize,
    pub output_dir: Option<PathBuf>,
    pub modulation: ModulationConfig,
    pub pulse: PulseShape,
    pub frame: FrameLayout,
    pub channel: ChannelParams,
    pub detector: DetectorModel,
    pub receiver: RxConfig,
    pub calibration: CalibrationConfig,
    pub estimation: EstimationConfig,
    pub reconciliation: ReconciliationConfig,
    pub privacy: PrivacyConfig,
    pub sweep: Option<SweepConfig>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            repetitions: 1,
            output_dir: None,
            modulation: ModulationConfig::default(),
            pulse: PulseShape::default(),
            frame: FrameLayout::default(),
            channel: ChannelParams::default(),
            detector: DetectorModel::default(),
            receiver: RxConfig::default(),
            calibration: CalibrationConfig::default(),
            estimation: EstimationConfig::default(),
            reconciliation: ReconciliationConfig::default(),
            privacy: PrivacyConfig::default(),
            sweep: None,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(config_err)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(config_err)
    }

    /// Checks every block; all failures are reported as config errors.
    pub fn validate(&self) -> Result<()> {
        let check = |r: Result<()>| r.map_err(config_err);
        if !(self.modulation.variance >= 0.0 && self.modulation.variance.is_finite()) {
            return Err(Error::Config("modulation.variance must be finite and non-negative".into()));
        }
        check(self.pulse.validate())?;
        check(self.frame.validate())?;
        check(self.channel.validate())?;
        check(self.detector.validate())?;
        if let Some(f) = &self.receiver.fixed_point {
            check(f.validate())?;
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if self.calibration.samples < 1000 || !(self.calibration.reference_lo_power > 0.0) {
            return Err(Error::Config("calibration needs ≥ 1000 samples and a positive LO reference".into()));
        }
        let e = &self.estimation;
        if !(e.epsilon_pe > 0.0 && e.epsilon_pe < 1.0) {
            return Err(Error::Config("estimation.epsilon_pe must lie in (0, 1)".into()));
        }
        if !(e.disclosed_fraction > 0.0 && e.disclosed_fraction < 1.0) && !e.reversed_order {
            return Err(Error::Config("estimation.disclosed_fraction must lie in (0, 1)".into()));
        }
        let r = &self.reconciliation;
        if !(0.0..=1.0).contains(&r.beta) || r.max_iterations == 0 || !(0.0..=1.0).contains(&r.max_fer) {
            return Err(Error::Config("reconciliation: beta and max_fer in [0, 1], max_iterations ≥ 1".into()));
        }
        if r.code != "auto" {
            code_by_name(&r.code).map_err(config_err)?;
        }
        if !(self.privacy.epsilon_h > 0.0 && self.privacy.epsilon_h < 1.0) {
            return Err(Error::Config("privacy.epsilon_h must lie in (0, 1)".into()));
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return Err(Error::Config("sweep.values must not be empty".into()));
            }
            self.with_parameter(&s.parameter, s.values[0])?;
        }
        Ok(())
    }

    /// A copy with the dotted `path` set to `value`.
    pub fn with_parameter(&self, path: &str, value: f64) -> Result<Self> {
        let mut doc = toml::Value::try_from(self).map_err(config_err)?;
        let unknown = || Error::Config(format!("unknown parameter `{path}`"));
        let (parents, leaf) = match path.rsplit_once('.') {
            Some((p, l)) => (p.split('.').collect::<Vec<_>>(), l),
            None => (Vec::new(), path),
        };
        let mut table = doc.as_table_mut().ok_or_else(unknown)?;
        for part in parents {
            table = table.get_mut(part).and_then(|v| v.as_table_mut()).ok_or_else(unknown)?;
        }
        let new = match table.get(leaf).ok_or_else(unknown)? {
            toml::Value::Integer(_) if value.fract() == 0.0 => toml::Value::Integer(value as i64),
            toml::Value::Integer(_) => return Err(Error::Config(format!("`{path}` needs an integer value"))),
            toml::Value::Float(_) => toml::Value::Float(value),
            _ => return Err(Error::Config(format!("`{path}` is not numeric"))),
        };
        table.insert(leaf.to_string(), new);
        let cfg: Self = doc.try_into().map_err(config_err)?;
        Ok(cfg)
    }
}
