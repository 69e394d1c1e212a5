use cvqkd::channel::{DetectionKind, DetectorModel, Quadrature};
use cvqkd::estimation::{
    asymptotic_rate, compute_skr, decide_abort, estimate_channel, g_entropy, holevo_bound, mutual_information,
    sift, sigma2_upper_bound, t_lower_bound, ChannelEstimate, Decision, Direction, FiniteSize, LinkModel,
    NoiseReference, NoiseTrust, QuantileConvention, SecurityResult,
};
use cvqkd::rng::{real_normals, stream_rng};
use cvqkd::Error;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rayon::prelude::*;
use statrs::function::erf::erfc;

const KINDS: [DetectionKind; 2] = [DetectionKind::Homodyne, DetectionKind::Heterodyne];
const DIRS: [Direction; 2] = [Direction::Direct, Direction::Reverse];

// Independent covariance-matrix oracle. Modes are ordered (x, p) pairs.

fn omega(n: usize) -> DMatrix<f64> {
    let mut om = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        om[(2 * k, 2 * k + 1)] = 1.0;
        om[(2 * k + 1, 2 * k)] = -1.0;
    }
    om
}

/// Symplectic eigenvalues: ν² are the eigenvalues of γ^½ Ωᵀ γ Ω γ^½.
fn symplectic(g: &DMatrix<f64>) -> Vec<f64> {
    let om = omega(g.nrows() / 2);
    let e = g.clone().symmetric_eigen();
    let root = &e.eigenvectors * DMatrix::from_diagonal(&e.eigenvalues.map(|v| v.sqrt())) * e.eigenvectors.transpose();
    let m = &root * om.transpose() * g * &om * &root;
    let mut nu: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().map(|v| v.max(0.0).sqrt()).collect();
    nu.sort_by(|a, b| a.partial_cmp(b).unwrap());
    nu.into_iter().step_by(2).collect()
}

fn entropy(g: &DMatrix<f64>) -> f64 {
    symplectic(g).into_iter().map(g_entropy).sum()
}

fn sub(g: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| g[(idx[i], idx[j])])
}

fn cross(g: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| g[(rows[i], cols[j])])
}

/// Conditional matrix of `keep` after homodyning the x quadrature of the
/// mode starting at index `m`.
fn after_homodyne(g: &DMatrix<f64>, keep: &[usize], m: usize) -> DMatrix<f64> {
    let c = cross(g, keep, &[m]);
    sub(g, keep) - &c * c.transpose() / g[(m, m)]
}

/// Conditional matrix of `keep` after heterodyning the mode at `m`.
fn after_heterodyne(g: &DMatrix<f64>, keep: &[usize], m: usize) -> DMatrix<f64> {
    let c = cross(g, keep, &[m, m + 1]);
    let gm = sub(g, &[m, m + 1]) + DMatrix::identity(2, 2);
    sub(g, keep) - &c * gm.try_inverse().unwrap() * c.transpose()
}

/// Two-mode squeezed block of variance `v` between modes at `a` and `b`.
fn epr(g: &mut DMatrix<f64>, a: usize, b: usize, v: f64) {
    let c = (v * v - 1.0).sqrt();
    for q in 0..2 {
        g[(a + q, a + q)] = v;
        g[(b + q, b + q)] = v;
        let s = if q == 0 { c } else { -c };
        g[(a + q, b + q)] = s;
        g[(b + q, a + q)] = s;
    }
}

/// Beam splitter of transmittance `t` acting on modes at `a` and `b`.
fn beam_splitter(g: &DMatrix<f64>, a: usize, b: usize, t: f64) -> DMatrix<f64> {
    let mut s = DMatrix::identity(g.nrows(), g.nrows());
    let (ct, st) = (t.sqrt(), (1.0 - t).sqrt());
    for q in 0..2 {
        s[(a + q, a + q)] = ct;
        s[(a + q, b + q)] = st;
        s[(b + q, a + q)] = -st;
        s[(b + q, b + q)] = ct;
    }
    &s * g * s.transpose()
}

/// Alice (0..2) and Bob (2..4) after the Gaussian channel.
fn ab_state(t: f64, xi: f64, v_a: f64) -> DMatrix<f64> {
    let v = v_a + 1.0;
    let mut g = DMatrix::zeros(4, 4);
    epr(&mut g, 0, 2, v);
    let c = (t * (v * v - 1.0)).sqrt();
    let b = t * v + 1.0 - t + t * xi;
    for q in 0..2 {
        g[(2 + q, 2 + q)] = b;
        let s = if q == 0 { c } else { -c };
        g[(q, 2 + q)] = s;
        g[(2 + q, q)] = s;
    }
    g
}

fn oracle_holevo(t: f64, xi: f64, v_a: f64, kind: DetectionKind, dir: Direction) -> f64 {
    let ab = ab_state(t, xi, v_a);
    let s_ab = entropy(&ab);
    match dir {
        Direction::Reverse => {
            let cond = match kind {
                DetectionKind::Homodyne => after_homodyne(&ab, &[0, 1], 2),
                DetectionKind::Heterodyne => after_heterodyne(&ab, &[0, 1], 2),
            };
            s_ab - entropy(&cond)
        }
        Direction::Direct => match kind {
            // Coherent-state preparation is a heterodyne on Alice's mode.
            DetectionKind::Heterodyne => s_ab - entropy(&after_heterodyne(&ab, &[2, 3], 0)),
            // Only the sifted quadrature is Alice's data: split her mode on
            // a balanced beam splitter and homodyne one arm; the other arm
            // stays in the purification.
            DetectionKind::Homodyne => {
                let mut g = DMatrix::identity(6, 6);
                g.view_mut((0, 0), (4, 4)).copy_from(&ab);
                let mut perm = DMatrix::zeros(6, 6);
                for (to, from) in [0, 1, 4, 5, 2, 3].into_iter().enumerate() {
                    perm[(to, from)] = 1.0;
                }
                // Order: Alice, vacuum, Bob.
                let g = &perm * g * perm.transpose();
                let g = beam_splitter(&g, 0, 2, 0.5);
                s_ab - entropy(&after_homodyne(&g, &[2, 3, 4, 5], 0))
            }
        },
    }
}

/// Reverse reconciliation with a trusted detector: Bob's mode meets one
/// half of an EPR pair (F0, G) on a beam splitter of transmittance η; Eve's
/// information is S(AB) − S(A F G | Bob's outcome).
fn oracle_trusted_rr(t: f64, xi: f64, v_a: f64, eta: f64, nu_el: f64, kind: DetectionKind) -> f64 {
    let ab = ab_state(t, xi, v_a);
    let v_det = match kind {
        DetectionKind::Homodyne => 1.0 + nu_el / (1.0 - eta),
        DetectionKind::Heterodyne => 1.0 + 2.0 * nu_el / (1.0 - eta),
    };
    let mut g = DMatrix::zeros(8, 8);
    g.view_mut((0, 0), (4, 4)).copy_from(&ab);
    epr(&mut g, 4, 6, v_det);
    let g = beam_splitter(&g, 2, 4, eta);
    let keep = [0, 1, 4, 5, 6, 7];
    let cond = match kind {
        DetectionKind::Homodyne => after_homodyne(&g, &keep, 2),
        DetectionKind::Heterodyne => after_heterodyne(&g, &keep, 2),
    };
    entropy(&ab) - entropy(&cond)
}

#[test]
fn holevo_matches_covariance_oracle() {
    for (t, xi, v_a) in [(0.398, 0.01, 5.0), (0.1, 0.05, 3.0), (0.5, 0.0, 5.0), (0.9, 0.02, 20.0), (0.01, 0.001, 2.0)] {
        for kind in KINDS {
            for dir in DIRS {
                let lib = holevo_bound(&LinkModel::ideal(t, xi, v_a, kind, dir)).unwrap();
                let want = oracle_holevo(t, xi, v_a, kind, dir);
                assert!((lib - want).abs() <= 1e-9, "T={t} ξ={xi} {kind:?} {dir:?}: {lib} vs {want}");
            }
        }
    }
}

#[test]
fn trusted_detector_matches_covariance_oracle() {
    for (t, xi, v_a, eta, nu) in [(0.398, 0.01, 5.0, 0.6, 0.05), (0.1, 0.02, 4.0, 0.8, 0.1), (0.7, 0.0, 10.0, 0.5, 0.0)] {
        for kind in KINDS {
            let link = LinkModel {
                eta,
                nu_el: nu,
                trusted_detector: true,
                ..LinkModel::ideal(t, xi, v_a, kind, Direction::Reverse)
            };
            let lib = holevo_bound(&link).unwrap();
            let want = oracle_trusted_rr(t, xi, v_a, eta, nu, kind);
            assert!((lib - want).abs() <= 1e-8, "T={t} η={eta} ν={nu} {kind:?}: {lib} vs {want}");
            let untrusted = holevo_bound(&LinkModel { trusted_detector: false, ..link }).unwrap();
            assert!(lib <= untrusted + 1e-12);
        }
    }
}

#[test]
fn entropy_and_mutual_information_values() {
    assert_eq!(g_entropy(1.0), 0.0);
    assert!((g_entropy(3.0) - 2.0).abs() < 1e-15);
    // g(x) = (x+1)/2·log₂((x+1)/2) − (x−1)/2·log₂((x−1)/2).
    assert!((g_entropy(5.0) - (3.0 * 3f64.log2() - 2.0 * 2f64.log2())).abs() < 1e-14);
    assert!((mutual_information(3.0, DetectionKind::Homodyne) - 1.0).abs() < 1e-15);
    assert!((mutual_information(3.0, DetectionKind::Heterodyne) - 2.0).abs() < 1e-15);
    assert_eq!(mutual_information(0.0, DetectionKind::Heterodyne), 0.0);
}

#[test]
fn sifting_heterodyne_keeps_both_quadratures() {
    let alice = vec![Complex64::new(1.0, 2.0), Complex64::new(3.0, 4.0)];
    let bob = vec![0.1, 0.2, 0.3, 0.4];
    let (x, y) = sift(&alice, None, &bob).unwrap();
    assert_eq!(x, vec![1.0, 2.0, 3.0, 4.0]);
    assert_eq!(y, bob);
    assert!(matches!(sift(&alice, None, &bob[..2]), Err(Error::LengthMismatch { .. })));
}

#[test]
fn sifting_homodyne_keeps_the_measured_quadrature() {
    let alice: Vec<Complex64> = (0..4).map(|k| Complex64::new(k as f64, -(k as f64) - 10.0)).collect();
    let all_q = vec![Quadrature::Q; 4];
    let (x, _) = sift(&alice, Some(&all_q), &[0.0; 4]).unwrap();
    assert_eq!(x, vec![0.0, 1.0, 2.0, 3.0]);
    let mixed = [Quadrature::P, Quadrature::Q, Quadrature::P, Quadrature::Q];
    let (x, _) = sift(&alice, Some(&mixed), &[0.0; 4]).unwrap();
    assert_eq!(x, vec![-10.0, 1.0, -12.0, 3.0]);
    assert!(sift(&alice, Some(&mixed[..3]), &[0.0; 4]).is_err());
    assert!(sift(&alice, Some(&mixed), &[0.0; 3]).is_err());
}

#[test]
fn sifting_random_choices_keeps_one_value_per_symbol() {
    let l = 10_000;
    let alice = vec![Complex64::new(1.0, -1.0); l];
    let mut rng = stream_rng(1, 0);
    let basis: Vec<Quadrature> = cvqkd::rng::coin_flips(&mut rng, l)
        .into_iter()
        .map(|b| if b { Quadrature::P } else { Quadrature::Q })
        .collect();
    let (x, y) = sift(&alice, Some(&basis), &vec![0.0; l]).unwrap();
    assert_eq!((x.len(), y.len()), (l, l));
    assert_eq!(x.iter().filter(|&&v| v == -1.0).count(), basis.iter().filter(|&&b| b == Quadrature::P).count());
}

#[test]
fn bound_substitution_examples() {
    assert!((t_lower_bound(0.5, 0.01, 2.0) - 0.48).abs() < 1e-15);
    assert!((sigma2_upper_bound(1.05, 0.01, 2.0) - 1.07).abs() < 1e-15);
}

#[test]
fn quantile_conventions_invert_erf() {
    for eps in [1e-2, 1e-5, 1e-10] {
        let z = QuantileConvention::ErfInverse.z(eps);
        assert!((erfc(z) / (eps / 2.0) - 1.0).abs() <= 1e-9);
        let z = QuantileConvention::NormalQuantile.z(eps);
        assert!((erfc(z / 2f64.sqrt()) / eps - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn noiseless_linear_data() {
    let x: Vec<f64> = (0..2000).map(|k| (k as f64 * 0.37).sin() * 2.0).collect();
    let y: Vec<f64> = x.iter().map(|v| 0.8 * v).collect();
    let e = estimate_channel(&x, &y, 1e-10, QuantileConvention::ErfInverse, NoiseReference::homodyne()).unwrap();
    assert!((e.t_hat - 0.8).abs() < 1e-12);
    assert!(e.sigma2_hat < 1e-24);
    assert!((e.xi_hat + 1.0 / 0.64).abs() < 1e-9);
    assert!(e.sub_vacuum);
    assert_eq!(e.m_disclosed, 2000);
    assert!(e.t_min <= e.t_hat && e.sigma2_max >= e.sigma2_hat);
}

#[test]
fn estimator_errors() {
    let x = vec![1.0; 2000];
    let r = NoiseReference::homodyne();
    let c = QuantileConvention::ErfInverse;
    assert!(matches!(estimate_channel(&x[..999], &x[..999], 0.1, c, r), Err(Error::InvalidParameter(_))));
    assert!(matches!(estimate_channel(&x, &x[..1999], 0.1, c, r), Err(Error::LengthMismatch { .. })));
    let zeros = vec![0.0; 2000];
    assert!(matches!(estimate_channel(&zeros, &x, 0.1, c, r), Err(Error::UnusableChannel(_))));
    let neg: Vec<f64> = x.iter().map(|v| -v).collect();
    assert!(matches!(estimate_channel(&x, &neg, 0.1, c, r), Err(Error::UnusableChannel(_))));
    for eps in [0.0, 1.0, f64::NAN] {
        assert!(estimate_channel(&x, &x, eps, c, r).is_err());
    }
}

/// Homodyne-style pairs: x ~ N(0, V_A), y = √T·x + N(0, 1 + T·ξ).
fn linear_pairs(t: f64, xi: f64, v_a: f64, m: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = stream_rng(seed, 0);
    let x = real_normals(&mut rng, m, v_a);
    let z = real_normals(&mut rng, m, 1.0 + t * xi);
    let y = x.iter().zip(&z).map(|(a, n)| t.sqrt() * a + n).collect();
    (x, y)
}

#[test]
fn transmission_estimate_covers_truth() {
    let truth = 0.5f64.sqrt();
    let hits: usize = (0..200u64)
        .into_par_iter()
        .map(|s| {
            let (x, y) = linear_pairs(0.5, 0.02, 5.0, 1_000_000, 1000 + s);
            let e = estimate_channel(&x, &y, 1e-10, QuantileConvention::ErfInverse, NoiseReference::homodyne()).unwrap();
            usize::from((e.t_hat - truth).abs() <= 3.0 * e.sd_t)
        })
        .sum();
    assert!(hits >= 198, "{hits}/200 within 3 sd");
}

#[test]
fn confidence_bounds_reach_their_coverage() {
    let (t, xi, runs, eps) = (0.5f64, 0.02, 500u64, 0.05);
    let sigma2 = 1.0 + t * xi;
    let results: Vec<(bool, bool)> = (0..runs)
        .into_par_iter()
        .map(|s| {
            let (x, y) = linear_pairs(t, xi, 5.0, 10_000, 5000 + s);
            let e = estimate_channel(&x, &y, eps, QuantileConvention::ErfInverse, NoiseReference::homodyne()).unwrap();
            (t.sqrt() >= e.t_min, sigma2 <= e.sigma2_max)
        })
        .collect();
    let floor = 1.0 - eps - 3.0 * (eps * (1.0 - eps) / runs as f64).sqrt();
    let t_cov = results.iter().filter(|r| r.0).count() as f64 / runs as f64;
    let s_cov = results.iter().filter(|r| r.1).count() as f64 / runs as f64;
    assert!(t_cov >= floor, "t coverage {t_cov}");
    assert!(s_cov >= floor, "σ² coverage {s_cov}");
}

fn exact_estimate(t: f64, xi: f64, kind: DetectionKind) -> ChannelEstimate {
    let vac = kind.vacuum_constant();
    let sigma2 = vac + t * xi;
    ChannelEstimate {
        t_hat: t.sqrt(),
        sigma2_hat: sigma2,
        xi_hat: xi,
        sd_t: 0.0,
        sd_sigma2: 0.0,
        t_min: t.sqrt(),
        sigma2_max: sigma2,
        epsilon_pe: 1e-10,
        m_disclosed: 1000,
        quantile_convention: QuantileConvention::ErfInverse,
        xi_min: xi,
        xi_max: xi,
        sub_vacuum: false,
    }
}

fn ideal_detector(kind: DetectionKind) -> DetectorModel {
    DetectorModel { kind, efficiency_eta: 1.0, electronic_noise_nu_el: 0.0, ..DetectorModel::default() }
}

fn asymptotic() -> FiniteSize {
    FiniteSize { disclosed_fraction: 0.0, n_key: 0, epsilon_h: 1e-10, penalty_in_rate: false }
}

fn skr(est: &ChannelEstimate, v_a: f64, kind: DetectionKind, dir: Direction) -> SecurityResult {
    compute_skr(est, v_a, &ideal_detector(kind), 1.0, dir, NoiseTrust::Untrusted, &asymptotic()).unwrap()
}

#[test]
fn direct_reconciliation_three_db_boundary() {
    // With the Holevo bound the boundary is reached as V_A grows; at
    // finite modulation the rate at T = 0.5 is already negative.
    let est = exact_estimate(0.5, 0.0, DetectionKind::Homodyne);
    let big = skr(&est, 1e6, DetectionKind::Homodyne, Direction::Direct);
    assert!(big.skr_asymptotic.abs() <= 1e-6, "{}", big.skr_asymptotic);
    let small = skr(&est, 5.0, DetectionKind::Homodyne, Direction::Direct);
    assert!(small.skr_asymptotic < 0.0);
    assert!(small.abort);
    let closer = skr(&exact_estimate(0.6, 0.0, DetectionKind::Homodyne), 1e6, DetectionKind::Homodyne, Direction::Direct);
    assert!(closer.skr_asymptotic > 0.0);
}

#[test]
fn reverse_reconciliation_beats_three_db() {
    for kind in KINDS {
        let r = skr(&exact_estimate(0.25, 0.0, kind), 5.0, kind, Direction::Reverse);
        assert!(r.skr_asymptotic > 0.0, "{kind:?}");
        assert!(!r.abort);
    }
}

#[test]
fn zero_modulation_aborts() {
    for kind in KINDS {
        let r = skr(&exact_estimate(0.5, 0.01, kind), 0.0, kind, Direction::Reverse);
        assert_eq!(r.mutual_info_bits_per_symbol, 0.0);
        assert!(r.skr_finite <= 0.0);
        assert!(r.abort);
        assert_eq!(decide_abort(&r), Decision::Abort);
    }
}

#[test]
fn compute_skr_agrees_with_link_model() {
    for kind in KINDS {
        for dir in DIRS {
            let r = skr(&exact_estimate(0.398, 0.01, kind), 5.0, kind, dir);
            let want = asymptotic_rate(&LinkModel::ideal(0.398, 0.01, 5.0, kind, dir), 1.0).unwrap();
            assert!((r.skr_asymptotic - want.skr).abs() < 1e-12);
            assert!((r.holevo_bound_bits - want.holevo).abs() < 1e-12);
        }
    }
}

#[test]
fn finite_size_penalty_arithmetic() {
    let est = exact_estimate(0.398, 0.01, DetectionKind::Heterodyne);
    let det = ideal_detector(DetectionKind::Heterodyne);
    let fs = FiniteSize { disclosed_fraction: 0.5, n_key: 100_000, epsilon_h: 1e-10, penalty_in_rate: true };
    let r = compute_skr(&est, 5.0, &det, 0.95, Direction::Reverse, NoiseTrust::Untrusted, &fs).unwrap();
    let want = 0.5 * r.skr_asymptotic - 2.0 * 1e10f64.log2() / 1e5;
    assert!((r.skr_finite - want).abs() < 1e-15);
    let off = FiniteSize { penalty_in_rate: false, ..fs };
    let r2 = compute_skr(&est, 5.0, &det, 0.95, Direction::Reverse, NoiseTrust::Untrusted, &off).unwrap();
    assert!((r2.skr_finite - 0.5 * r.skr_asymptotic).abs() < 1e-15);
    assert!(compute_skr(&est, 5.0, &det, 1.1, Direction::Reverse, NoiseTrust::Untrusted, &fs).is_err());
    let bad = FiniteSize { disclosed_fraction: 1.0, ..fs };
    assert!(compute_skr(&est, 5.0, &det, 0.95, Direction::Reverse, NoiseTrust::Untrusted, &bad).is_err());
}

#[test]
fn trusted_noise_raises_the_rate() {
    let det = DetectorModel { efficiency_eta: 0.7, electronic_noise_nu_el: 0.05, ..ideal_detector(DetectionKind::Heterodyne) };
    let (t, xi, nu) = (0.398 * 0.7, 0.01, 0.05);
    let sigma2 = 2.0 * (1.0 + nu) + t * xi;
    let est = ChannelEstimate { sigma2_hat: sigma2, sigma2_max: sigma2, ..exact_estimate(t, xi, DetectionKind::Heterodyne) };
    let fs = asymptotic();
    let trusted = compute_skr(&est, 5.0, &det, 0.95, Direction::Reverse, NoiseTrust::Trusted { nu_el: nu }, &fs).unwrap();
    let untrusted = compute_skr(&est, 5.0, &det, 0.95, Direction::Reverse, NoiseTrust::Untrusted, &fs).unwrap();
    assert!(trusted.skr_asymptotic > untrusted.skr_asymptotic);
    assert!((trusted.transmittance_worst - 0.398).abs() < 1e-12);
    assert!((trusted.xi_worst - 0.01).abs() < 1e-12);
}

fn result_with(skr_finite: f64) -> SecurityResult {
    SecurityResult {
        mutual_info_bits_per_symbol: 1.0,
        holevo_bound_bits: 0.5,
        skr_asymptotic: skr_finite.max(0.5),
        skr_finite,
        reconciliation_beta: 0.95,
        abort: !(skr_finite > 0.0),
        reconciliation_direction: Direction::Reverse,
        transmittance_worst: 0.5,
        xi_worst: 0.01,
    }
}

#[test]
fn abort_decision_boundaries() {
    assert_eq!(decide_abort(&result_with(0.01)), Decision::Continue);
    assert_eq!(decide_abort(&result_with(-0.001)), Decision::Abort);
    assert_eq!(decide_abort(&result_with(0.0)), Decision::Abort);
    assert_eq!(decide_abort(&result_with(f64::NAN)), Decision::Abort);
}

#[test]
fn rate_falls_with_excess_noise_and_distance() {
    for kind in KINDS {
        for dir in DIRS {
            let by_xi: Vec<f64> = (0..10)
                .map(|i| asymptotic_rate(&LinkModel::ideal(0.6, 0.005 * i as f64, 5.0, kind, dir), 0.95).unwrap().skr)
                .collect();
            let by_d: Vec<f64> = (0..10)
                .map(|i| {
                    let t = 10f64.powf(-0.2 * 10.0 * i as f64 / 10.0);
                    asymptotic_rate(&LinkModel::ideal(t, 0.01, 5.0, kind, dir), 0.95).unwrap().skr
                })
                .collect();
            assert!(by_xi.windows(2).all(|w| w[1] <= w[0]), "{kind:?} {dir:?} ξ: {by_xi:?}");
            assert!(by_d.windows(2).all(|w| w[1] <= w[0]), "{kind:?} {dir:?} distance: {by_d:?}");
        }
    }
}

#[test]
fn holevo_vanishes_on_a_perfect_channel() {
    for kind in KINDS {
        for dir in DIRS {
            for v_a in [0.5, 5.0, 50.0] {
                let chi = holevo_bound(&LinkModel::ideal(1.0, 0.0, v_a, kind, dir)).unwrap();
                assert!(chi.abs() <= 1e-9, "{kind:?} {dir:?} V_A={v_a}: χ={chi}");
            }
        }
    }
}

#[test]
fn unphysical_parameters_are_rejected() {
    let link = LinkModel::ideal(0.5, -3.0, 5.0, DetectionKind::Homodyne, Direction::Reverse);
    assert!(matches!(holevo_bound(&link), Err(Error::NonPhysical(_))));
}

fn kind_of(b: bool) -> DetectionKind {
    if b {
        DetectionKind::Heterodyne
    } else {
        DetectionKind::Homodyne
    }
}

fn dir_of(b: bool) -> Direction {
    if b {
        Direction::Reverse
    } else {
        Direction::Direct
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn holevo_is_non_negative(t in 1e-3f64..=1.0, xi in 0.0f64..0.2, v_a in 0.1f64..50.0, k in any::<bool>(), d in any::<bool>()) {
        let chi = holevo_bound(&LinkModel::ideal(t, xi, v_a, kind_of(k), dir_of(d))).unwrap();
        prop_assert!(chi >= -1e-12);
    }

    #[test]
    fn worst_case_never_beats_point_estimate(
        t in 0.05f64..0.95, xi in 0.0f64..0.1, log_m in 3.0f64..9.0, eps in 1e-12f64..0.1,
        k in any::<bool>(), d in any::<bool>(),
    ) {
        // Both deviations follow from the same m disclosed samples.
        let kind = kind_of(k);
        let point = exact_estimate(t, xi, kind);
        let m = 10f64.powf(log_m);
        let v_a = 5.0;
        let sd_t = (point.sigma2_hat / (m * v_a)).sqrt();
        let sd_s = point.sigma2_hat * (2.0 / m).sqrt();
        let z = QuantileConvention::ErfInverse.z(eps);
        let worst = ChannelEstimate {
            sd_t,
            sd_sigma2: sd_s,
            t_min: t_lower_bound(point.t_hat, sd_t, z),
            sigma2_max: sigma2_upper_bound(point.sigma2_hat, sd_s, z),
            ..point
        };
        prop_assume!(worst.t_min > 0.0);
        let a = skr(&worst, 5.0, kind, dir_of(d));
        let b = skr(&point, 5.0, kind, dir_of(d));
        prop_assert!(a.skr_asymptotic <= b.skr_asymptotic + 1e-12);
    }

    #[test]
    fn finite_rate_never_exceeds_asymptotic(
        t in 0.05f64..0.95, xi in 0.0f64..0.1, frac in 0.0f64..0.9, n in 1usize..10_000_000, k in any::<bool>(),
    ) {
        let kind = kind_of(k);
        let fs = FiniteSize { disclosed_fraction: frac, n_key: n, epsilon_h: 1e-10, penalty_in_rate: true };
        let r = compute_skr(&exact_estimate(t, xi, kind), 5.0, &ideal_detector(kind), 0.95, Direction::Reverse, NoiseTrust::Untrusted, &fs).unwrap();
        prop_assert!(r.skr_finite <= r.skr_asymptotic);
        prop_assert_eq!(r.abort, !(r.skr_finite > 0.0));
        prop_assert_eq!(decide_abort(&r) == Decision::Abort, r.abort);
    }
}
