//! Desk-scale simulator and post-processing toolkit for Gaussian-modulated
//! coherent-state continuous-variable QKD.
//!
//! The crate follows the signal from Alice's transmitter DSP ([`txdsp`])
//! through the fiber and detector models ([`channel`]), Bob's receiver DSP
//! ([`rxdsp`]) and shot-noise calibration ([`calibration`]), to parameter
//! estimation and key-rate evaluation ([`estimation`]), reconciliation
//! ([`reconciliation`]) and privacy amplification ([`privacy`]). The
//! [`harness`] module wires these into configurable runs and sweeps.

pub mod calibration;
pub mod channel;
pub mod error;
pub mod estimation;
pub mod harness;
pub mod privacy;
pub mod reconciliation;
pub mod rng;
pub mod rxdsp;
pub mod signal;
pub mod txdsp;

pub use error::{Error, Result};
