use std::f64::consts::PI;

use cauchy_lipschitz::kernels::{beta_fn, cauchy_kernel, kz_kernel, schur_row_integral};
use cauchy_lipschitz::quadrature::{integrate_line, integrate_line_with, LineOptions};
use cauchy_lipschitz::report::Relation;
use cauchy_lipschitz::transform::{cauchy_transform, BoundaryFunction};
use cauchy_lipschitz::{ConeSpec, CurveSpec, QuadConfig, Region};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bank() -> Vec<CurveSpec> {
    vec![
        CurveSpec::line(),
        CurveSpec::wedge(0.5).unwrap(),
        CurveSpec::wedge(1.0).unwrap(),
        CurveSpec::sine(0.5, 1.0).unwrap(),
        CurveSpec::ramp(1.0, 1.0).unwrap(),
    ]
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn kz_is_a_difference_of_cauchy_kernels() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let mut draw = || c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let (zeta, zeta0, z) = (draw(), draw(), draw());
        let (Ok(k), Ok(a), Ok(b)) = (kz_kernel(zeta, zeta0, z), cauchy_kernel(zeta, zeta0 + z), cauchy_kernel(zeta, zeta0 - z)) else {
            continue;
        };
        let diff = a - b;
        worst = worst.max((k.value - diff).norm() / (1.0 + diff.norm()));
    }
    assert!(worst < 1e-11, "worst relative mismatch {worst}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn kz_is_odd_in_z(zr in -3.0..3.0f64, zi in 0.05..3.0f64, sr in -5.0..5.0f64, si in -2.0..2.0f64) {
        let z = c(zr, zi);
        let (zeta, zeta0) = (c(sr, si), c(0.2, -0.1));
        let (Ok(p), Ok(m)) = (kz_kernel(zeta, zeta0, z), kz_kernel(zeta, zeta0, -z)) else { return Ok(()) };
        prop_assert!((p.value + m.value).norm() <= 1e-13 * p.value.norm().max(1.0));
    }

    #[test]
    fn beta_is_symmetric(a in 0.05..6.0f64, b in 0.05..6.0f64) {
        let (x, y) = (beta_fn(a, b).unwrap(), beta_fn(b, a).unwrap());
        prop_assert!((x - y).abs() <= 1e-13 * x.abs());
    }

    #[test]
    fn curves_are_lipschitz(u in -50.0..50.0f64, v in -50.0..50.0f64) {
        for curve in bank() {
            let lhs = (curve.a(u) - curve.a(v)).abs();
            prop_assert!(lhs <= curve.lip() * (u - v).abs() * (1.0 + 1e-12) + 1e-14, "{}", curve.label());
        }
    }

    #[test]
    fn cones_are_dilation_invariant(phi in 0.1..1.4f64, r in 0.01..10.0f64, t in -0.99..0.99f64, lambda in 0.01..100.0f64) {
        let vertex = c(0.3, 0.2);
        let cone = ConeSpec::new(vertex, phi, 0.4).unwrap();
        let w = vertex + cone.bisector() * Complex64::from_polar(r, t * (PI / 2.0 - phi));
        prop_assert!(cone.contains(w).unwrap());
        prop_assert!(cone.contains(vertex + (w - vertex) * lambda).unwrap());
    }

    #[test]
    fn distance_is_one_lipschitz_and_bounded_by_the_vertical_gap(x in -20.0..20.0f64, y in -20.0..20.0f64, dx in -1.0..1.0f64, dy in -1.0..1.0f64) {
        for curve in bank() {
            let (w1, w2) = (c(x, y), c(x + dx, y + dy));
            let (d1, d2) = (curve.distance(w1, 1e-12).unwrap(), curve.distance(w2, 1e-12).unwrap());
            prop_assert!((d1 - d2).abs() <= (w1 - w2).norm() + 1e-9, "{}", curve.label());
            prop_assert!(d1 <= (y - curve.a(x)).abs() + 1e-12);
        }
    }

    #[test]
    fn relations_only_loosen(lhs in -10.0..10.0f64, rhs in -10.0..10.0f64, tol in 0.0..1.0f64) {
        for rel in [Relation::EqRel, Relation::EqAbs, Relation::AtMost, Relation::AtMostAbs, Relation::AtLeast] {
            if rel.holds(lhs, rhs, tol) {
                prop_assert!(rel.holds(lhs, rhs, 10.0 * tol + 1e-12));
            }
        }
    }
}

#[test]
fn sine_distance_matches_a_dense_scan() {
    let curve = CurveSpec::sine(0.5, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..40 {
        let w = c(rng.gen_range(-10.0..10.0), rng.gen_range(-30.0..30.0));
        let d = curve.distance(w, 1e-12).unwrap();
        let lo = w.re - 40.0;
        let brute = (0..=800_000).map(|k| (curve.eval(lo + 1e-4 * k as f64) - w).norm()).fold(f64::INFINITY, f64::min);
        assert!(d <= brute + 1e-12 && brute - d <= 1e-7, "{w}: {d} vs {brute}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn line_integrals_are_linear(alpha in -3.0..3.0f64, beta in -3.0..3.0f64, s in 0.3..3.0f64) {
        let cfg = QuadConfig::default();
        let f = |t: f64| Complex64::new(1.0 / (1.0 + t * t), t / (1.0 + t * t).powi(2));
        let g = |t: f64| Complex64::new((-t * t / s).exp(), 0.0) / (1.0 + (t / s).powi(2));
        let a = integrate_line(f, &cfg).unwrap().value;
        let b = integrate_line(g, &cfg).unwrap().value;
        let ab = integrate_line(|t| alpha * f(t) + beta * g(t), &cfg).unwrap().value;
        prop_assert!((ab - (alpha * a + beta * b)).norm() <= 1e-7 * (1.0 + ab.norm()));
    }

    #[test]
    fn line_integrals_commute_with_conjugation(p in -2.0..2.0f64, q in 0.2..2.0f64) {
        let cfg = QuadConfig::default();
        let f = |t: f64| 1.0 / (Complex64::new(t - p, q) * Complex64::new(t + p, q));
        let a = integrate_line(f, &cfg).unwrap().value;
        let b = integrate_line(|t| f(t).conj(), &cfg).unwrap().value;
        prop_assert!((a.conj() - b).norm() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn truncated_positive_integrals_grow_with_the_window(r1 in 0.5..20.0f64, extra in 0.1..20.0f64) {
        let cfg = QuadConfig::default();
        let f = |t: f64| Complex64::new(1.0 / (1.0 + t * t) + (-(t - 1.0).powi(2)).exp(), 0.0);
        let window = |r: f64| integrate_line_with(f, &cfg, &LineOptions { support: Some((-r, r)), ..Default::default() }).unwrap().value.re;
        prop_assert!(window(r1 + extra) >= window(r1) - 1e-10);
        prop_assert!(window(r1 + extra) <= integrate_line(f, &cfg).unwrap().value.re + 1e-8);
    }

    #[test]
    fn transform_on_the_line_is_translation_covariant(s in -5.0..5.0f64, x in -3.0..3.0f64, y in 0.1..2.0f64, side in prop::bool::ANY) {
        let cfg = QuadConfig::default();
        let line = CurveSpec::line();
        let y = if side { y } else { -y };
        let g = BoundaryFunction::bump(0.0, 1.0).unwrap();
        let shifted = BoundaryFunction::bump(s, 1.0).unwrap();
        let a = cauchy_transform(&g, &line, c(x, y), &cfg).unwrap();
        let b = cauchy_transform(&shifted, &line, c(x + s, y), &cfg).unwrap();
        prop_assert!((a - b).norm() <= 1e-8 * (1.0 + a.norm()));
    }

    #[test]
    fn schur_integral_on_the_line_is_scale_free(x in -10.0..10.0f64, y in 0.01..50.0f64, below in prop::bool::ANY) {
        let cfg = QuadConfig::default();
        let w = c(x, if below { -y } else { y });
        let v = schur_row_integral(w, &CurveSpec::line(), &cfg).unwrap().value.re;
        prop_assert!((v - PI).abs() <= 1e-6, "{w}: {v}");
    }
}

#[test]
fn errors_stay_within_tolerance_and_estimate() {
    let f = |t: f64| Complex64::new((-t * t).exp() * (3.0 * t).cos() + 1.0 / (1.0 + t * t).powi(2), 0.0);
    let exact = PI.sqrt() * (-2.25f64).exp() + PI / 2.0;
    for tol in [1e-3, 1e-5, 1e-7, 1e-9, 1e-11] {
        let cfg = QuadConfig { rel_tol: tol, abs_tol: tol, tail_exponent: 4.0, ..Default::default() };
        let r = integrate_line(f, &cfg).unwrap();
        let err = (r.value.re - exact).abs();
        assert!(err <= r.error_estimate + 1e-14, "tol {tol}: error {err} over estimate {}", r.error_estimate);
        assert!(err <= tol * exact, "tol {tol}: error {err}");
    }
}

#[test]
fn region_classification_agrees_with_the_graph() {
    for curve in bank() {
        for u in [-7.0, -1.0, 0.0, 0.5, 3.0] {
            let z = curve.eval(u);
            assert_eq!(curve.region_of(z + c(0.0, 1e-3)), Region::Above);
            assert_eq!(curve.region_of(z - c(0.0, 1e-3)), Region::Below);
        }
    }
}
