//! Sifting, linear-model channel estimation with finite-size worst-case
//! bounds, Holevo-bound key rates and the abort decision.

mod estimator;
mod keyrate;
mod security;
mod sifting;

pub use estimator::{
    estimate_channel, sigma2_upper_bound, t_lower_bound, ChannelEstimate, NoiseReference, QuantileConvention,
    MIN_SAMPLES,
};
pub use keyrate::{asymptotic_rate, g_entropy, holevo_bound, mutual_information, Direction, KeyRate, LinkModel};
pub use security::{compute_skr, decide_abort, Decision, FiniteSize, NoiseTrust, SecurityResult};
pub use sifting::sift;
