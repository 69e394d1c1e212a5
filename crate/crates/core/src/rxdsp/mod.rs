//! Bob's receiver DSP: CD compensation, pilot separation, down-conversion
//! and matched filtering, clock recovery, frame sync, pilot-aided phase
//! correction, one-tap equalization and SNU normalization.

mod chain;
mod fixed_point;
mod phase;
mod pilot;
mod sync;
mod timing;

pub use chain::{
    cd_compensate, downconvert_matched_filter, noise_samples, receive, snu_normalize, DspReport, RxConfig, RxOutput,
};
pub use fixed_point::{fixed_point_quantize, quantize_complex, FixedPoint, Rounding};
pub use phase::{equalize, one_tap_estimate, pilot_phase_correct};
pub use pilot::{extract_pilot, lowpass_taps, unwrap, PilotConfig, PilotTrack};
pub use sync::{frame_sync, SyncResult, DEFAULT_SYNC_THRESHOLD};
pub use timing::{
    gardner_recover, gardner_ted, interpolate, raised_cosine, resample, ted_gain, ted_s_curve, GardnerConfig,
    TimingEstimate,
};
