use std::f64::consts::PI;

use conflab_core::special::{
    cardy_f, gamma_ln, hyp2f1_113, rectangle_cross_ratio, rectangle_crossing_prediction, triangle_map,
    triangle_side_position, TRIANGLE_C,
};
use conflab_core::ComplexPoint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GAMMA_ONE_THIRD: f64 = 2.678_938_534_707_747_6;
const GAMMA_TWO_THIRDS: f64 = 1.354_117_939_426_400_4;

/// Composite Simpson rule with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|k| f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

/// `∫₀ˣ (t(1 − t))^{−2/3} dt / B(1/3, 1/3)` with `t = s³`, which turns the
/// integrand into the bounded `3(1 − s³)^{−2/3}` on `[0, x^{1/3}]`.
fn cardy_oracle(x: f64) -> f64 {
    let beta = GAMMA_ONE_THIRD * GAMMA_ONE_THIRD / GAMMA_TWO_THIRDS;
    simpson(|s| 3.0 * (1.0 - s * s * s).powf(-2.0 / 3.0), 0.0, x.cbrt(), 200_000) / beta
}

#[test]
fn cardy_endpoints_and_midpoint() {
    assert_eq!(cardy_f(0.0).unwrap(), 0.0);
    assert_eq!(cardy_f(1.0).unwrap(), 1.0);
    assert!((cardy_f(0.5).unwrap() - 0.5).abs() < 1e-10);
    assert!((cardy_oracle(0.5) - 0.5).abs() < 1e-10, "oracle normalization {}", cardy_oracle(0.5));
}

#[test]
fn cardy_matches_quadrature_oracle() {
    for x in [0.05, 0.2, 0.5, 0.75, 0.9] {
        let f = cardy_f(x).unwrap();
        assert!((f - cardy_oracle(x)).abs() < 1e-10, "x = {x}: {f} vs {}", cardy_oracle(x));
    }
}

#[test]
fn hypergeometric_matches_integral_representation() {
    let c = 3.0 * GAMMA_TWO_THIRDS / (GAMMA_ONE_THIRD * GAMMA_ONE_THIRD);
    for x in [0.2, 0.5, 0.9] {
        let via_integral = cardy_oracle(x) / (c * x.cbrt());
        let h = hyp2f1_113(x).unwrap();
        assert!((h - via_integral).abs() < 1e-10, "x = {x}: {h} vs {via_integral}");
    }
    assert_eq!(hyp2f1_113(0.0).unwrap(), 1.0);
    let x = 1e-6;
    let first_order = 1.0 + x / 6.0;
    assert!(((hyp2f1_113(x).unwrap() - first_order) / first_order).abs() < 1e-9);
}

#[test]
fn cardy_complement_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let x: f64 = rng.random();
        let s = cardy_f(x).unwrap() + cardy_f(1.0 - x).unwrap();
        assert!((s - 1.0).abs() < 1e-10, "x = {x}: {s}");
    }
}

#[test]
fn gamma_identities() {
    assert!(gamma_ln(1.0).unwrap().abs() < 1e-15);
    assert!((gamma_ln(0.5).unwrap() - 0.5 * PI.ln()).abs() < 1e-12);
    for x in [0.5, 1.5, 7.0] {
        assert!((gamma_ln(x + 1.0).unwrap() - gamma_ln(x).unwrap() - f64::ln(x)).abs() < 1e-12);
    }
    assert!((gamma_ln(1.0 / 3.0).unwrap() - GAMMA_ONE_THIRD.ln()).abs() < 1e-12);
}

#[test]
fn rectangle_cross_ratio_properties() {
    assert!((rectangle_cross_ratio(1.0, 1.0).unwrap() - 0.5).abs() < 1e-10);
    assert!((rectangle_crossing_prediction(1.0, 1.0).unwrap() - 0.5).abs() < 1e-10);
    for (l1, l2) in [(2.0, 1.0), (3.0, 1.0), (1.3, 0.7)] {
        let s = rectangle_cross_ratio(l1, l2).unwrap() + rectangle_cross_ratio(l2, l1).unwrap();
        assert!((s - 1.0).abs() < 1e-10, "({l1}, {l2}): {s}");
    }
    let mut previous = 0.0;
    for k in (1..=40).rev() {
        let x = rectangle_cross_ratio(k as f64 / 10.0, 1.0).unwrap();
        assert!(x > previous, "cross-ratio must grow as the rectangle narrows");
        previous = x;
    }
    assert!(previous > 0.99);
}

#[test]
fn triangle_map_normalization_and_side() {
    assert_eq!(triangle_map(ComplexPoint::new(0.0, 0.0)).unwrap(), ComplexPoint::new(0.0, 0.0));
    assert!((triangle_map(ComplexPoint::new(1.0, 0.0)).unwrap() - TRIANGLE_C).norm() < 1e-8);
    for x in [0.25, 0.5, 0.75] {
        let w = triangle_map(ComplexPoint::new(x, 0.0)).unwrap();
        // On the segment [A, C]: collinear with C and strictly between.
        assert!((w * TRIANGLE_C.conj()).im.abs() < 1e-8, "x = {x}: {w}");
        assert!(w.norm() > 0.0 && w.norm() < 1.0);
    }
    for x in [1.0, 2.0, 10.0] {
        assert!((triangle_side_position(x).unwrap() - cardy_f(1.0 / x).unwrap()).abs() < 1e-10);
    }
}
