//! Alice's transmitter DSP: Gaussian symbol generation, RRC pulse shaping,
//! Zadoff-Chu framing, digital up-conversion and pilot insertion.

mod frame;
mod rrc;
mod zadoff_chu;

pub use frame::{
    build_frame, gaussian_symbols, generate_symbols, payload_samples, preamble_symbols, shape_symbols, FrameLayout,
    ModulationParams, Waveform,
};
pub use rrc::{rrc_taps, PulseShape};
pub use zadoff_chu::{circular_autocorrelation, zadoff_chu};
