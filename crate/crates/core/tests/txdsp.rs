use cvqkd::signal::{self, read_iq, write_iq};
use cvqkd::txdsp::{
    build_frame, circular_autocorrelation, generate_symbols, payload_samples, rrc_taps, zadoff_chu, FrameLayout,
    ModulationParams, PulseShape,
};
use cvqkd::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn shape(rolloff: f64, sps: usize, span: usize) -> PulseShape {
    PulseShape { rolloff, samples_per_symbol: sps, filter_span: span }
}

#[test]
fn zero_variance_gives_exact_zeros() {
    let s = generate_symbols(&ModulationParams { variance: 0.0, symbol_count: 5, rng_seed: 3 }).unwrap();
    assert_eq!(s, vec![Complex64::new(0.0, 0.0); 5]);
}

#[test]
fn quadrature_variance_matches_modulation() {
    let s = generate_symbols(&ModulationParams { variance: 5.0, symbol_count: 1_000_000, rng_seed: 11 }).unwrap();
    let re: Vec<f64> = s.iter().map(|v| v.re).collect();
    let im: Vec<f64> = s.iter().map(|v| v.im).collect();
    for v in [signal::variance(&re), signal::variance(&im)] {
        assert!((4.97..=5.03).contains(&v), "variance {v}");
    }
}

#[test]
fn generation_is_deterministic_per_seed() {
    let p = ModulationParams { variance: 5.0, symbol_count: 1000, rng_seed: 42 };
    assert_eq!(generate_symbols(&p).unwrap(), generate_symbols(&p).unwrap());
    let q = ModulationParams { rng_seed: 43, ..p };
    assert_ne!(generate_symbols(&p).unwrap(), generate_symbols(&q).unwrap());
}

#[test]
fn non_finite_variance_is_rejected() {
    for v in [f64::NAN, f64::INFINITY, -1.0] {
        let p = ModulationParams { variance: v, symbol_count: 4, rng_seed: 0 };
        assert!(generate_symbols(&p).is_err());
    }
}

#[test]
fn sinc_limit_has_unit_energy() {
    let h = rrc_taps(&shape(0.0, 4, 32)).unwrap();
    assert_eq!(h.len(), 32 * 4 + 1);
    let e: f64 = h.iter().map(|v| v * v).sum();
    assert!((e - 1.0).abs() <= 1e-12);
}

fn symbol_lag(h: &[f64], sps: usize, k: usize) -> f64 {
    (0..h.len() - sps * k).map(|i| h[i] * h[i + sps * k]).sum()
}

#[test]
fn matched_pair_has_no_symbol_spaced_isi() {
    let h = rrc_taps(&shape(0.2, 4, 4096)).unwrap();
    let worst = (1..=16).map(|k| symbol_lag(&h, 4, k).abs()).fold(0.0, f64::max);
    assert!(worst <= 1e-9, "worst ISI {worst:e}");
}

#[test]
fn short_span_isi_is_bounded_by_truncated_tail_energy() {
    // A 32-symbol RRC differs from the ideal pulse only by its tails; by
    // Cauchy-Schwarz the cascade moves by at most 2‖tail‖ + ‖tail‖².
    let long = rrc_taps(&shape(0.2, 4, 16384)).unwrap();
    let c = long.len() / 2;
    let kept = &long[c - 64..=c + 64];
    let tail2 = 1.0 - kept.iter().map(|v| v * v).sum::<f64>();
    let bound = 2.0 * tail2.sqrt() + tail2;
    let ideal = (1..=16).map(|k| symbol_lag(&long, 4, k).abs()).fold(0.0, f64::max);
    let h = rrc_taps(&shape(0.2, 4, 32)).unwrap();
    let peak = symbol_lag(&h, 4, 0);
    let worst = (1..=31).map(|k| symbol_lag(&h, 4, k).abs() / peak).fold(0.0, f64::max);
    assert!(worst <= (bound + ideal) / (1.0 - tail2), "ISI {worst:e} above bound {bound:e}");
    assert!(worst > 1e-9);
}

#[test]
fn occupied_band_ends_at_the_rolloff_edge() {
    let s = shape(0.4, 4, 4096);
    let h = rrc_taps(&s).unwrap();
    let n = 1 << 16;
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (b, v) in buf.iter_mut().zip(&h) {
        b.re = *v;
    }
    signal::fft(&mut buf);
    let mag: Vec<f64> = buf.iter().map(|v| v.norm()).collect();
    let peak = mag.iter().cloned().fold(0.0, f64::max);
    // One-sided edge (1 + β)/2 = 0.7 symbol rates; sps = 4 maps it to 0.175 cycles/sample.
    let edge = 0.7 / 4.0;
    let mut worst = f64::NEG_INFINITY;
    for (k, m) in mag.iter().enumerate() {
        let f = signal::bin_omega(k, n).abs() / (2.0 * std::f64::consts::PI);
        if f > edge {
            worst = worst.max(20.0 * (m / peak).log10());
        }
    }
    assert!(worst <= -60.0, "out-of-band level {worst:.1} dB");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn taps_have_unit_energy(rolloff in 0.0f64..=1.0, sps in 2usize..9, half_span in 1usize..33) {
        let h = rrc_taps(&shape(rolloff, sps, 2 * half_span)).unwrap();
        let e: f64 = h.iter().map(|v| v * v).sum();
        prop_assert!((e - 1.0).abs() <= 1e-12);
        prop_assert_eq!(h.len(), 2 * half_span * sps + 1);
    }

    #[test]
    fn frames_are_deterministic(seed in any::<u64>()) {
        let layout = FrameLayout { payload_symbols: 256, ..FrameLayout::default() };
        let s = shape(0.2, 4, 32);
        let p = ModulationParams { variance: 5.0, symbol_count: 256, rng_seed: seed };
        let a = build_frame(&generate_symbols(&p).unwrap(), 5.0, &s, &layout).unwrap();
        let b = build_frame(&generate_symbols(&p).unwrap(), 5.0, &s, &layout).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn zero_payload_without_pilot_is_silent_after_the_preamble() {
    let s = shape(0.2, 4, 32);
    let layout = FrameLayout { payload_symbols: 500, pilot_amplitude: 0.0, ..FrameLayout::default() };
    let w = build_frame(&vec![Complex64::new(0.0, 0.0); 500], 5.0, &s, &layout).unwrap();
    assert_eq!(w.samples.len(), (64 + 500) * 4 + s.tap_count() - 1);
    // The preamble's pulse tails end span/2 symbols into the payload.
    let (start, _) = payload_samples(&s, &layout);
    let quiet = start + s.delay();
    // Fast convolution leaves round-off at the 1e-16 level.
    let peak = w.samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
    assert!(w.samples[quiet..].iter().all(|v| v.norm() <= 1e-12 * peak));
    assert!(w.samples[..quiet].iter().any(|v| v.norm() > 0.0));
}

#[test]
fn zadoff_chu_is_cazac() {
    let z = zadoff_chu(64, 1).unwrap();
    assert!(z.iter().all(|v| (v.norm() - 1.0).abs() <= 1e-12));
    let peak = circular_autocorrelation(&z, 0).norm();
    for shift in 1..64 {
        assert!(circular_autocorrelation(&z, shift).norm() <= 1e-9 * peak);
    }
}

#[test]
fn zadoff_chu_rejects_non_coprime_root() {
    assert!(zadoff_chu(64, 2).is_err());
}

#[test]
fn pilot_inside_signal_band_is_rejected() {
    let s = shape(0.2, 4, 32);
    let layout = FrameLayout { payload_symbols: 10, pilot_frequency: 0.15, ..FrameLayout::default() };
    let err = build_frame(&[Complex64::new(1.0, 0.0); 10], 5.0, &s, &layout).unwrap_err();
    assert!(matches!(err, Error::SpectralOverlap { .. }));
}

#[test]
fn payload_energy_equals_modulation_variance() {
    let s = shape(0.2, 4, 64);
    let n = 100_000;
    let layout = FrameLayout { payload_symbols: n, pilot_amplitude: 0.0, ..FrameLayout::default() };
    let sym = generate_symbols(&ModulationParams { variance: 5.0, symbol_count: n, rng_seed: 5 }).unwrap();
    let w = build_frame(&sym, 5.0, &s, &layout).unwrap();
    let (a, b) = payload_samples(&s, &layout);
    // Skip the preamble/payload boundary region.
    let a = a + s.tap_count();
    let rms2 = signal::mean_power(&w.samples[a..b]) / 2.0;
    assert!((rms2 / 5.0 - 1.0).abs() < 0.01, "per-quadrature power {rms2}");
}

#[test]
fn iq_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.iq");
    let x: Vec<Complex64> = (0..100).map(|k| Complex64::new(k as f64 * 0.5, -(k as f64))).collect();
    write_iq(&path, &x, 4).unwrap();
    let raw = std::fs::read(&path).unwrap();
    assert_eq!(&raw[..4], b"CVQK");
    assert_eq!(raw.len(), 32 + 16 * 100);
    let (y, sps) = read_iq(&path).unwrap();
    assert_eq!(sps, 4);
    assert_eq!(x, y);
}
