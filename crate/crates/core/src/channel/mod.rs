//! Fiber channel and coherent detector models: loss, excess noise, laser
//! phase noise, chromatic dispersion, frequency offset, balanced detection
//! with shot and electronic noise, and ADC quantization.

mod detector;
mod fiber;

pub use detector::{
    adc_quantize, basis_choices, dark_record, detect, quantize_record, vacuum_record, DetectionKind, DetectionTruth,
    DetectorModel, Quadrature, QuadratureRecord, Units,
};
pub(crate) use fiber::dispersion;
pub use fiber::{apply_fiber, transmittance, ChannelParams, ChannelTruth};
