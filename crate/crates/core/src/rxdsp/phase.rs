use num_complex::Complex64;

use super::pilot::PilotTrack;

/// Rotates each symbol by the negated pilot phase at its sample position.
/// Returns the corrected symbols and the track's residual phase variance.
pub fn pilot_phase_correct(symbols: &[Complex64], positions: &[f64], track: &PilotTrack) -> (Vec<Complex64>, f64) {
    let out = symbols
        .iter()
        .zip(positions)
        .map(|(s, &p)| s * Complex64::from_polar(1.0, -track.phase_at(p)))
        .collect();
    (out, track.residual_phase_var())
}

/// Least-squares one-tap channel estimate Σ r·conj(p)/Σ|p|².
pub fn one_tap_estimate(received: &[Complex64], reference: &[Complex64]) -> Complex64 {
    let num: Complex64 = received.iter().zip(reference).map(|(r, p)| r * p.conj()).sum();
    let den: f64 = reference.iter().map(|p| p.norm_sqr()).sum();
    if den > 0.0 {
        num / den
    } else {
        Complex64::new(1.0, 0.0)
    }
}

/// Removes the phase of `gain`. Amplitude is left to parameter estimation.
pub fn equalize(symbols: &mut [Complex64], gain: Complex64) {
    if gain.norm() == 0.0 {
        return;
    }
    let rot = Complex64::from_polar(1.0, -gain.arg());
    for s in symbols.iter_mut() {
        *s *= rot;
    }
}
