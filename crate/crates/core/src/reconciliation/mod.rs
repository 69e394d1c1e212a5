//! Reverse and direct reconciliation: 8-dimensional rotation to a virtual
//! binary-input channel, QC-LDPC syndrome coding with belief propagation,
//! a sign-bit baseline, and efficiency/FER metrics.

mod frame;
pub mod ldpc;
mod message;
mod metrics;
mod multidim;
pub mod octonion;
mod sign;

pub use frame::{receiver_llrs, reconcile_frame, reconcile_frames, FrameOutcome, FrameParams, FrameStatus};
pub use message::{key_crc, SyndromeMessage};
pub use metrics::{awgn_capacity, measure_performance, Performance};
pub use multidim::{bits_to_point, md_project, MdRotation, DIM};
pub use sign::{sign_llrs, sign_reconcile, SignReconciliation};
