// reference digits kept as printed by the arbitrary-precision run
#![allow(clippy::excessive_precision)]

use num_complex::Complex64;
use proptest::prelude::*;
use scatgate::integrate;
use scatgate::wavepacket::{
    analytic_concurrence, asymptotic_concurrence, numeric_concurrence, numeric_concurrence_for, scaled_erfc,
    WavepacketSpec,
};

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// `√π e^{z²} − 2z M(1, 3/2, z²)`, the Kummer form of `f`.
fn kummer_oracle(z: Complex64) -> Complex64 {
    let x = z * z;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for n in 0..400 {
        term *= x / (n as f64 + 1.5);
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    x.exp() * SQRT_PI - 2.0 * z * sum
}

/// `2∫₀^∞ e^{−t² − 2zt} dt`.
fn integral_oracle(z: Complex64) -> Complex64 {
    integrate(|t| (-(t * t) - 2.0 * z * t).exp() * 2.0, 0.0, 12.0, 1e-14, 4000)
        .unwrap()
        .value
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn scaled_erfc_reference_values() {
    // 40-digit references
    let table = [
        ((0.5, 0.0), (1.091_282_721_530_094_1, 0.0)),
        ((1.9, -1.1), (0.386_707_487_250_273_08, 0.189_032_110_494_557_44)),
        ((0.2, 5.5), (0.006_959_735_786_424_727_3, -0.184_719_099_390_928_48)),
        ((3.0, -4.0), (0.123_701_258_734_318_33, 0.158_351_027_465_934_52)),
        ((0.7, -12.0), (0.004_895_571_814_069_979_7, 0.083_337_135_584_423_669)),
        ((50.0, 0.0), (0.019_996_002_397_603_354, 0.0)),
        ((30.0, -40.0), (0.012_003_743_815_634_089, 0.015_998_589_606_419_637)),
        ((1.5, -1.7), (0.318_423_914_522_137_93, 0.299_509_996_272_799_75)),
        ((0.9, -6.5), (0.021_653_284_791_267_399, 0.152_622_844_325_134_46)),
    ];
    for ((x, y), (re, im)) in table {
        let z = Complex64::new(x, y);
        let got = scaled_erfc(z).unwrap();
        assert!(rel(got, Complex64::new(re, im)) < 1e-12, "z = {z}: {got}");
    }
    let pure_imag = scaled_erfc(Complex64::new(0.0, 50.0)).unwrap();
    assert!((pure_imag.im + 0.020_004_002_402_403_366).abs() < 1e-15);
    assert!(pure_imag.re.abs() < 1e-300);
}

#[test]
fn scaled_erfc_asymptotic_identity() {
    for arg in [0.0, -0.4, -1.0, -1.5, 0.7] {
        let z = Complex64::from_polar(50.0, arg);
        let lhs = z * scaled_erfc(z).unwrap();
        let rhs = Complex64::new(1.0, 0.0) - z.powi(-2) * 0.5;
        assert!((lhs - rhs).norm() < 1e-6, "arg {arg}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn scaled_erfc_matches_kummer_series(r in 0.0f64..=2.0, arg in -std::f64::consts::FRAC_PI_2..=std::f64::consts::FRAC_PI_2) {
        let z = Complex64::from_polar(r, arg);
        let z = Complex64::new(z.re.max(0.0), z.im);
        prop_assert!(rel(scaled_erfc(z).unwrap(), kummer_oracle(z)) < 1e-10);
    }

    #[test]
    fn scaled_erfc_matches_integral(x in 0.0f64..8.0, y in -9.0f64..9.0) {
        let z = Complex64::new(x, y);
        let got = scaled_erfc(z).unwrap();
        let want = integral_oracle(z);
        prop_assert!((got - want).norm() < 1e-9 * want.norm().max(1e-2), "z = {}: {} vs {}", z, got, want);
    }

    #[test]
    fn analytic_concurrence_in_unit_interval(delta in -0.9f64..2.0, eta in 1e-4f64..1.5) {
        let c = analytic_concurrence(&WavepacketSpec::new(delta, eta).unwrap()).unwrap();
        prop_assert!((0.0..=1.0).contains(&c));
    }

    #[test]
    fn numeric_concurrence_is_scale_invariant(mean in 0.2f64..3.0, width in 0.02f64..0.6, lambda in 0.01f64..100.0) {
        let a = numeric_concurrence(mean, width, 1.0).unwrap();
        let b = numeric_concurrence(lambda * mean, lambda * width, lambda).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn erfc_rejects_left_half_plane() {
    assert!(scaled_erfc(Complex64::new(-0.1, 0.0)).is_err());
    assert!(scaled_erfc(Complex64::new(f64::INFINITY, 0.0)).is_err());
}

/// Independent arbitrary-precision evaluation of `2 Re z Im f(z)`.
const FROZEN: [(f64, f64, f64); 9] = [
    (-0.3, 0.05, 0.936_942_911_129_605),
    (-0.3, 0.2, 0.897_780_679_779_780),
    (-0.3, 0.5, 0.722_385_137_367_088),
    (0.0, 0.05, 0.998_745_342_050_300),
    (0.0, 0.2, 0.978_933_314_585_525),
    (0.0, 0.5, 0.858_499_609_013_419),
    (0.3, 0.05, 0.966_102_169_659_499),
    (0.3, 0.2, 0.958_741_088_465_644),
    (0.3, 0.5, 0.897_374_522_861_806),
];

#[test]
fn analytic_matches_frozen_values() {
    for (delta, eta, want) in FROZEN {
        let got = analytic_concurrence(&WavepacketSpec::new(delta, eta).unwrap()).unwrap();
        assert!((got - want).abs() < 1e-12, "({delta}, {eta}): {got}");
    }
}

#[test]
fn analytic_matches_quadrature() {
    for (delta, eta, _) in FROZEN {
        let s = WavepacketSpec::new(delta, eta).unwrap();
        let a = analytic_concurrence(&s).unwrap();
        let q = numeric_concurrence_for(&s).unwrap();
        assert!((a - q).abs() < 1e-6, "({delta}, {eta}): {a} vs {q}");
    }
}

#[test]
fn asymptotic_branch_for_large_z() {
    for (delta, eta) in [(0.0, 0.07), (0.3, 0.09), (-0.3, 0.05), (1.0, 0.1)] {
        let s = WavepacketSpec::new(delta, eta).unwrap();
        assert!(s.z().norm() >= 10.0);
        let diff = (asymptotic_concurrence(&s).unwrap() - analytic_concurrence(&s).unwrap()).abs();
        assert!(diff < 1e-3, "({delta}, {eta}): {diff}");
    }
}

#[test]
fn positive_detuning_is_more_robust() {
    for eta in [0.3, 0.5] {
        let plus = analytic_concurrence(&WavepacketSpec::new(0.3, eta).unwrap()).unwrap();
        let minus = analytic_concurrence(&WavepacketSpec::new(-0.3, eta).unwrap()).unwrap();
        assert!(plus > minus, "eta {eta}");
    }
}

#[test]
fn concurrence_decays_with_width() {
    let mut last = 1.0;
    for k in 1..=40 {
        let c = analytic_concurrence(&WavepacketSpec::new(0.0, 0.025 * k as f64).unwrap()).unwrap();
        assert!(c < last);
        last = c;
    }
}

#[test]
fn narrow_packet_limit() {
    let s = WavepacketSpec::new(0.0, 1e-8).unwrap();
    assert!((analytic_concurrence(&s).unwrap() - 1.0).abs() < 1e-6);
    let s = WavepacketSpec::new(0.5, 1e-9).unwrap();
    assert!((analytic_concurrence(&s).unwrap() - 2.0 * 1.5 / 3.25).abs() < 1e-12);
}

#[test]
fn invalid_packets_are_rejected() {
    assert!(WavepacketSpec::new(0.0, 0.0).is_err());
    assert!(WavepacketSpec::new(f64::NAN, 0.1).is_err());
    assert!(WavepacketSpec::with_coupling(0.0, 0.1, -1.0).is_err());
    assert!(numeric_concurrence(1.0, 0.0, 1.0).is_err());
}
