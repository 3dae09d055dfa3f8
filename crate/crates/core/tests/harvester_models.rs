use proptest::prelude::*;
use rfharvest::channel::dbm_to_mw;
use rfharvest::harvester::*;
use rfharvest::Error;

fn truth_of(ds: Dataset) -> GroundTruth {
    GroundTruth::fit(&ds.curve(), ds.fit_degree()).unwrap()
}

/// `e(s) = 0.6 t + 0.12 t^2 - 0.18 t^3 + 0.06 t^4` with `t = (s + 20) / 30`.
fn quartic_in_t(s: f64) -> f64 {
    let t = (s + 20.0) / 30.0;
    t * (0.6 + t * (0.12 + t * (-0.18 + t * 0.06)))
}

fn quartic_monomials() -> Vec<f64> {
    let in_t = [0.0, 0.6, 0.12, -0.18, 0.06];
    let mut out = [0.0; 5];
    // (s + 20)^k / 30^k expanded with binomial coefficients.
    for (k, &c) in in_t.iter().enumerate() {
        let mut binom = 1.0;
        for j in 0..=k {
            out[j] += c * binom * 20f64.powi((k - j) as i32) / 30f64.powi(k as i32);
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
    }
    out.to_vec()
}

#[test]
fn exact_quartic_recovery() {
    let pts: Vec<(f64, f64)> = (0..40)
        .map(|i| {
            let s = -20.0 + 30.0 * i as f64 / 39.0;
            let x = dbm_to_mw(s);
            (x, if i == 0 { 0.0 } else { quartic_in_t(s) * x })
        })
        .collect();
    let curve = HarvesterCurve::new(pts).unwrap();
    let fit = fit_efficiency(&curve, 4, FitOptions::default()).unwrap();
    for (got, want) in fit.coefficients().iter().zip(quartic_monomials()) {
        assert!((got - want).abs() <= 1e-8 * want.abs().max(1e-6), "{got} vs {want}");
    }
    for i in 0..=300 {
        let s = -20.0 + 0.1 * i as f64;
        assert!((fit.eval_dbm(s) - quartic_in_t(s)).abs() < 1e-10);
    }
}

#[test]
fn rectenna_fit_residual() {
    let fit = fit_efficiency(&Dataset::RectennaA.curve(), 10, FitOptions::default()).unwrap();
    assert!(fit.max_residual() <= 0.02, "{}", fit.max_residual());
    let (lo, hi) = fit.domain_mw();
    assert!((lo.log10() + 4.25).abs() < 1e-12 && (hi.log10() - 1.6).abs() < 1e-12);
}

#[test]
fn degree_zero_underfits() {
    match fit_efficiency(&Dataset::ModuleB.curve(), 0, FitOptions::default()) {
        Err(Error::FitInfeasible(_)) => {}
        Err(e) => panic!("unexpected error {e}"),
        Ok(f) => assert!(f.max_residual() > 0.02),
    }
}

#[test]
fn ground_truth_shape() {
    let gt = truth_of(Dataset::RectennaA);
    let (sen, sat) = (gt.sensitivity_mw(), gt.saturation_mw());
    assert_eq!(gt.power(sen / 2.0), 0.0);
    assert_eq!(gt.power(2.0 * sat), gt.power(sat));
    let e0 = gt.efficiency().coefficients()[0];
    assert!((gt.power(1.0) - e0).abs() < 1e-12);
}

#[test]
fn single_segment_from_endpoints() {
    let gt = truth_of(Dataset::ModuleB);
    let (sen, sat) = (gt.sensitivity_mw(), gt.saturation_mw());
    let h = PiecewiseLinear::from_function(&gt, sen, sat, 1, Spacing::UniformLinear).unwrap();
    assert_eq!(h.supports(), &[sen, sat]);
    assert_eq!(h.images()[0], 0.0);
    assert_eq!(h.images()[1], gt.power(sat));
}

#[test]
fn module_b_datapoints_become_supports() {
    let h = PiecewiseLinear::from_curve(&Dataset::ModuleB.curve()).unwrap();
    assert_eq!(h.supports().len(), 53);
}

#[test]
fn uniform_linear_spacing() {
    let gt = truth_of(Dataset::RectennaA);
    let (sen, sat) = (gt.sensitivity_mw(), gt.saturation_mw());
    let h = PiecewiseLinear::from_function(&gt, sen, sat, 1170, Spacing::UniformLinear).unwrap();
    let step = (sat - sen) / 1170.0;
    for w in h.supports().windows(2) {
        assert!(((w[1] - w[0]) - step).abs() < 1e-9 * step);
    }
}

fn naive_interp(b: &[f64], v: &[f64], x: f64) -> f64 {
    if x <= b[0] {
        return 0.0;
    }
    for i in 1..b.len() {
        if x <= b[i] {
            return v[i - 1] + (v[i] - v[i - 1]) * (x - b[i - 1]) / (b[i] - b[i - 1]);
        }
    }
    v[v.len() - 1]
}

#[test]
fn piecewise_matches_naive_scan() {
    let h = PiecewiseLinear::from_curve(&Dataset::RectennaA.curve()).unwrap();
    let (b, v) = (h.supports(), h.images());
    for (i, &bi) in b.iter().enumerate() {
        assert_eq!(h.power(bi), v[i]);
    }
    for i in 0..5000 {
        let x = dbm_to_mw(-45.0 + 65.0 * i as f64 / 4999.0);
        let want = naive_interp(b, v, x);
        assert!((h.power(x) - want).abs() <= 1e-14 * want.abs().max(1e-300), "x = {x}");
    }
    let mid = 0.5 * (b[0] + b[1]);
    assert!((h.power(mid) - 0.5 * v[1]).abs() <= 1e-15 * v[1]);
}

#[test]
fn piecewise_inverse_on_two_segments() {
    let h = PiecewiseLinear::new(vec![1.0, 2.0, 5.0], vec![0.0, 0.5, 1.5]).unwrap();
    let y = 0.75;
    let (mut lo, mut hi) = (1.0_f64, 5.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h.power(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!((h.inverse_checked(y).unwrap() - lo).abs() < 1e-12);
    assert_eq!(h.inverse_checked(0.0).unwrap(), 1.0);
    assert_eq!(h.inverse_checked(1.5).unwrap(), 5.0);
    assert!(h.inverse_checked(1.6).is_err());
    assert!(h.inverse_checked(-0.1).is_err());
}

#[test]
fn baselines() {
    let l = Linear::new(0.3).unwrap();
    assert!((l.power(2.0) - 0.6).abs() < 1e-15);
    assert!((l.inverse(0.6).unwrap() - 2.0).abs() < 1e-15);
    let cl = ConstantLinear::new(0.4, 0.1).unwrap();
    assert_eq!(cl.power(0.1), 0.0);
    assert!((cl.inverse(0.4).unwrap() - 1.1).abs() < 1e-15);
    let clc = ConstantLinearConstant::new(0.5, 0.1, 3.0).unwrap();
    let plateau = 0.5 * 2.9;
    assert!((clc.power(6.0) - plateau).abs() < 1e-15);
    assert!((clc.plateau() - plateau).abs() < 1e-15);
    let x = clc.inverse(0.99 * plateau).unwrap();
    assert!(x < 3.0);
    assert!((clc.power(x) - 0.99 * plateau).abs() < 1e-14);
    assert!(clc.inverse(plateau).is_none());
    assert!(l.inverse(0.0).is_none());
}

#[test]
fn sigmoid_recovers_generating_parameters() {
    let truth = Sigmoid::new(0.5, 3.0, 0.8).unwrap();
    let mut pts = vec![(1e-9, 0.0)];
    pts.extend((1..=60).map(|i| {
        let x = 0.05 * i as f64;
        (x, truth.power(x))
    }));
    let fitted = fit_sigmoid(&HarvesterCurve::new(pts).unwrap()).unwrap();
    assert!((fitted.saturation_mw / 0.5 - 1.0).abs() < 1e-6, "{fitted:?}");
    assert!((fitted.steepness / 3.0 - 1.0).abs() < 1e-6, "{fitted:?}");
    assert!((fitted.center_mw / 0.8 - 1.0).abs() < 1e-6, "{fitted:?}");
    assert!((truth.power(1e4) - 0.5).abs() < 1e-12);
    assert_eq!(truth.power(0.0), 0.0);
}

#[test]
fn quadratic_goes_negative_near_sensitivity() {
    let q = fit_quadratic(&Dataset::ModuleB.curve()).unwrap();
    let sen = Dataset::ModuleB.curve().sensitivity_mw();
    assert!(q.c < 0.0, "{q:?}");
    assert!(q.power(0.5 * sen) < 0.0, "{q:?}");
}

#[test]
fn quadratic_fits_exact_parabola() {
    let pts: Vec<(f64, f64)> = (1..10).map(|i| {
        let x = i as f64 * 0.5;
        (x, 0.02 * x * x + 0.3 * x - 0.155)
    }).collect();
    let q = fit_quadratic(&HarvesterCurve::new(pts).unwrap()).unwrap();
    assert!((q.a - 0.02).abs() < 1e-12 && (q.b - 0.3).abs() < 1e-12 && (q.c + 0.155).abs() < 1e-12, "{q:?}");
}

#[test]
fn approximation_error_within_bound() {
    let gt = truth_of(Dataset::RectennaA);
    let (sen, sat) = (gt.sensitivity_mw(), gt.saturation_mw());
    let mut last = f64::INFINITY;
    for m in [10, 100, 1000] {
        let h = PiecewiseLinear::from_function(&gt, sen, sat, m, Spacing::UniformLinear).unwrap();
        let e = approximation_error(&gt, &h, 1e-8).unwrap();
        assert!(e.integrated <= e.bound, "M = {m}: {} > {}", e.integrated, e.bound);
        assert!(e.integrated < last);
        last = e.integrated;
    }
}

#[test]
fn grid_search_finds_minimum() {
    let grid: Vec<f64> = (0..=1000).map(|k| k as f64 / 1000.0).collect();
    let (eta, val) = grid_search_eta(&grid, |e| (e - 0.437).powi(2)).unwrap();
    assert_eq!(eta, 0.437);
    assert!(val < 1e-20);
}

#[test]
fn csv_round_trip() {
    let c = Dataset::ModuleB.curve();
    let back = HarvesterCurve::parse_csv(&c.to_csv()).unwrap();
    for (a, b) in c.points().iter().zip(back.points()) {
        assert!((a.0 - b.0).abs() <= 1e-12 * a.0 && (a.1 - b.1).abs() <= 1e-12 * a.1.max(1e-300));
    }
}

#[test]
fn invalid_curves_rejected() {
    assert!(HarvesterCurve::new(vec![(1.0, 0.0), (0.5, 0.1)]).is_err());
    assert!(HarvesterCurve::new(vec![(1.0, 0.0)]).is_err());
    assert!(HarvesterCurve::parse_csv("a,b\n1,x\n").is_err());
}

proptest! {
    #[test]
    fn piecewise_round_trip(u in 0.0f64..1.0) {
        let h = PiecewiseLinear::from_curve(&Dataset::ModuleB.curve()).unwrap();
        let y = u * h.max_output();
        let x = h.inverse_checked(y).unwrap();
        prop_assert!((h.power(x) - y).abs() <= 1e-12 * h.max_output());
    }

    #[test]
    fn piecewise_nondecreasing(a in -45.0f64..20.0, d in 0.0f64..5.0) {
        let h = PiecewiseLinear::from_curve(&Dataset::RectennaA.curve()).unwrap();
        prop_assert!(h.power(dbm_to_mw(a)) <= h.power(dbm_to_mw(a + d)));
    }

    #[test]
    fn output_below_input(dbm in -45.0f64..20.0) {
        let gt = truth_of(Dataset::RectennaA);
        let x = dbm_to_mw(dbm);
        prop_assert!(gt.power(x) >= 0.0 && gt.power(x) <= x);
    }
}
