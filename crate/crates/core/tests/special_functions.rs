use proptest::prelude::*;
use rfharvest::quadrature::{integrate, QuadOptions};
use rfharvest::special::*;

const TIGHT: QuadOptions = QuadOptions { rel_tol: 1e-13, abs_tol: 0.0, max_intervals: 200_000 };

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn q_by_quadrature(x: f64) -> f64 {
    let upper = x.max(0.0) + 40.0;
    integrate(normal_pdf, x, upper, &[], TIGHT).unwrap().value
}

#[test]
fn gamma_matches_factorials() {
    let mut f = 1.0;
    for n in 1..=20u32 {
        if n > 1 {
            f *= (n - 1) as f64;
        }
        assert!(rel(gamma(n as f64).unwrap(), f) < 1e-14, "n = {n}");
    }
    assert!(rel(gamma(0.5).unwrap(), std::f64::consts::PI.sqrt()) < 1e-14);
}

#[test]
fn gamma_rejects_poles() {
    assert!(gamma(0.0).is_err());
    assert!(gamma(-2.0).is_err());
    assert!(ln_gamma(-1.0).is_err());
}

#[test]
fn upper_incomplete_gamma_against_quadrature() {
    let oracle = integrate(|t: f64| t.powf(4.0) * (-t).exp(), 3.7, 200.0, &[], TIGHT)
        .unwrap()
        .value;
    assert!(rel(upper_incomplete_gamma(5.0, 3.7).unwrap(), oracle) < 1e-9);
}

#[test]
fn upper_incomplete_gamma_integer_shape_closed_form() {
    for &z in &[0.1f64, 1.0, 3.7, 12.0, 40.0] {
        let series: f64 = (0..5).map(|k| z.powi(k) / gamma(k as f64 + 1.0).unwrap()).sum();
        let expect = 24.0 * (-z).exp() * series;
        assert!(rel(upper_incomplete_gamma(5.0, z).unwrap(), expect) < 1e-13, "z = {z}");
    }
}

#[test]
fn q_function_quantile_example() {
    let q = q_function(1.2816);
    assert!((q - 0.1).abs() < 1e-4, "{q}");
    assert!(rel(q, q_by_quadrature(1.2816)) < 1e-10);
}

#[test]
fn q_function_against_quadrature() {
    for &x in &[-3.0, -0.5, 0.0, 0.7, 2.0, 5.0, 9.0] {
        assert!(rel(q_function(x), q_by_quadrature(x)) < 1e-10, "x = {x}");
    }
}

#[test]
fn q_inverse_known_point() {
    let x = q_inverse(1e-5).unwrap();
    assert!((x - 4.264_890_793_9).abs() < 1e-8, "{x}");
}

#[test]
fn r_inverse_against_bisection() {
    let y = 1e-5;
    let (mut lo, mut hi) = (0.0_f64, 10.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if r_function(mid).unwrap() > y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!(rel(r_inverse(y).unwrap(), 0.5 * (lo + hi)) < 1e-12);
}

#[test]
fn inverse_domains() {
    assert!(q_inverse(0.0).is_err());
    assert!(q_inverse(1.0).is_err());
    assert!(r_inverse(0.5).is_err());
    assert!(r_function(0.0).is_err());
}

proptest! {
    #[test]
    fn q_symmetry(x in -30.0f64..30.0) {
        prop_assert!((q_function(x) + q_function(-x) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn q_round_trip(p in 1e-300f64..0.999_999) {
        let x = q_inverse(p).unwrap();
        prop_assert!(rel(q_function(x), p) < 1e-10);
    }

    #[test]
    fn r_round_trip(log_y in -300.0f64..-0.31) {
        let y = 10f64.powf(log_y);
        let x = r_inverse(y).unwrap();
        prop_assert!(rel(r_function(x).unwrap(), y) < 1e-9);
    }

    #[test]
    fn r_decreasing(a in 1e-3f64..30.0, d in 1e-6f64..1.0) {
        prop_assert!(r_function(a + d).unwrap() <= r_function(a).unwrap());
    }

    #[test]
    fn regularized_gammas_sum_to_one(a in 0.1f64..50.0, z in 0.0f64..200.0) {
        let s = regularized_lower_gamma(a, z).unwrap() + regularized_upper_gamma(a, z).unwrap();
        prop_assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_recurrence(x in 0.05f64..100.0) {
        prop_assert!(rel(gamma(x + 1.0).unwrap(), x * gamma(x).unwrap()) < 1e-13);
    }
}
