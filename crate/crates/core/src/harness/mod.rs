//! Experiment orchestration: TOML configuration, the end-to-end pipeline
//! with its output bundle, and parameter sweeps.

mod config;
mod pipeline;
mod sweep;

pub use config::{
    CalibrationConfig, EstimationConfig, ExperimentConfig, ModulationConfig, PrivacyConfig, ReconciliationConfig,
    SweepConfig, SweepMode, TrustMode,
};
pub use pipeline::{
    nominal_link, run_calibration, run_pipeline, select_code, write_bundle, ReconciliationReport, RunArtifacts,
    RunOutcome, RunRecord, RunTruth, SummaryRow,
};
pub use sweep::{analytic_point, expected_estimate, svg_chart, sweep, write_csv, SweepReport};
