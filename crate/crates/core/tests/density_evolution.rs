use proptest::prelude::*;
use rfharvest::channel::{FadingChannel, LinkBudget, ReceivedPower};
use rfharvest::density::*;
use rfharvest::harvester::{Dataset, PiecewiseLinear, Spacing};
use rfharvest::montecarlo::{simulate_first_passage, SimulationPlan};
use rfharvest::stats::HarvestedPowerDistribution;
use rfharvest::validation::reference_models;

fn rectenna_distribution(d: f64) -> (PiecewiseLinear, ReceivedPower, HarvestedPowerDistribution) {
    let (_, pw) = reference_models(Dataset::RectennaA, 586, Spacing::UniformDb).unwrap();
    let rp = ReceivedPower::new(&LinkBudget::new(1500.0, d).unwrap(), &FadingChannel::default()).unwrap();
    let dist = HarvestedPowerDistribution::new(&pw, rp);
    (pw, rp, dist)
}

fn gamma5_density(grid: GridSpec) -> (ReceivedPower, DiscretizedDensity) {
    let rp = ReceivedPower::from_mean(1.0, 5.0).unwrap();
    (rp, discretize_fn(|x| rp.pdf(x), grid).unwrap())
}

#[test]
fn triangular_from_two_uniforms() {
    let h = 2000;
    let grid = GridSpec::new(0.0, 2.0, h, 8192).unwrap();
    let u = discretize_fn(|x| if x <= 1.0 { 1.0 } else { 0.0 }, grid).unwrap();
    let t = convolve_n(&u, 2).unwrap();
    let worst = (0..t.grid().nodes())
        .map(|j| {
            let x = t.grid().node(j);
            let exact = if x <= 1.0 { x } else { (2.0 - x).max(0.0) };
            (t.values()[j] - exact).abs()
        })
        .fold(0.0, f64::max);
    assert!(worst <= 2.0 / h as f64, "{worst}");
}

#[test]
fn atom_at_zero_deposited_on_first_node() {
    let (pw, _, _) = rectenna_distribution(5.0);
    let rp = ReceivedPower::from_mean(pw.sensitivity_mw() * 1.6, 5.0).unwrap();
    let dist = HarvestedPowerDistribution::new(&pw, rp);
    let xi0 = dist.atom_at_zero();
    assert!(xi0 > 0.05 && xi0 < 0.95, "{xi0}");
    let grid = default_grid_with(dist.mean(), dist.variance(), 1, 4096).unwrap();
    let d = discretize(&dist, grid).unwrap();
    let g = grid.resolution();
    let k = grid.intervals / 3;
    let scale = d.values()[k] / dist.pdf(grid.node(k)).density;
    assert!((scale - 1.0).abs() < 1e-3);
    let deposited = (d.values()[0] / scale - dist.pdf(0.0).density) * g;
    assert!((deposited / xi0 - 1.0).abs() < 1e-12, "{deposited} vs {xi0}");
}

#[test]
fn gamma_mean_after_discretization() {
    let grid = GridSpec::new(0.0, 12.0, 4096, 8192).unwrap();
    let (rp, d) = gamma5_density(grid);
    assert!((d.mean() / rp.mean() - 1.0).abs() < 1e-3);
    assert!((d.variance() / rp.variance() - 1.0).abs() < 1e-3);
}

#[test]
fn gamma_cdf_at_nodes() {
    let h = 4096;
    let grid = GridSpec::new(0.0, 12.0, h, 8192).unwrap();
    let (rp, d) = gamma5_density(grid);
    let f = cdf_from_density(&d);
    let g = grid.resolution();
    let at_edges = (0..grid.nodes()).map(|j| (f[j] - rp.cdf(grid.node(j) + 0.5 * g)).abs()).fold(0.0, f64::max);
    assert!(at_edges <= 2.0 / h as f64, "{at_edges}");
    let peak = (0..grid.nodes()).map(|j| rp.pdf(grid.node(j))).fold(0.0, f64::max);
    let at_nodes = (0..grid.nodes()).map(|j| (f[j] - rp.cdf(grid.node(j))).abs()).fold(0.0, f64::max);
    assert!(at_nodes <= peak * g, "{at_nodes}");
    assert!(f.windows(2).all(|w| w[1] >= w[0]));
    assert!((f[h] - 1.0).abs() < 1e-6);
}

#[test]
fn point_mass_cdf_is_step() {
    let grid = GridSpec::new(0.0, 1.0, 100, 256).unwrap();
    let d = DiscretizedDensity::point_mass(grid, 37).unwrap();
    let f = cdf_from_density(&d);
    assert!(f[..37].iter().all(|&v| v == 0.0));
    assert!(f[37..].iter().all(|&v| (v - 1.0).abs() < 1e-15));
}

#[test]
fn fft_matches_direct_for_twenty_blocks() {
    let (_, _, dist) = rectenna_distribution(5.0);
    let grid = default_grid_with(dist.mean(), dist.variance(), 20, 512).unwrap();
    let grid = GridSpec { fft_size: 16384, ..grid };
    let single = discretize(&dist, grid).unwrap();
    let fft = convolve_n(&single, 20).unwrap().probabilities();
    let direct = convolve_n_direct(&single, 20).unwrap().probabilities();
    assert_eq!(fft.len(), direct.len());
    let worst = fft.iter().zip(&direct).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(worst <= 1e-8, "{worst}");
}

#[test]
fn fft_matches_direct_small_grids() {
    let (_, _, dist) = rectenna_distribution(4.0);
    for h in [256usize, 512] {
        let grid = default_grid_with(dist.mean(), dist.variance(), 5, h).unwrap();
        let grid = GridSpec { fft_size: 8 * h, ..grid };
        let single = discretize(&dist, grid).unwrap();
        for n in [2usize, 3, 5] {
            let a = convolve_n(&single, n).unwrap().probabilities();
            let b = convolve_n_direct(&single, n).unwrap().probabilities();
            let worst = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            assert!(worst <= 1e-8, "H={h} N={n}: {worst}");
        }
    }
}

#[test]
fn moments_add_under_convolution() {
    let grid = GridSpec::new(0.0, 30.0, 4096, 8192).unwrap();
    let (_, d) = gamma5_density(grid);
    for n in [2usize, 7, 10] {
        let u = convolve_n(&d, n).unwrap();
        assert!((u.mass() - 1.0).abs() < 1e-6);
        assert!((u.mean() / (n as f64 * d.mean()) - 1.0).abs() < 1e-3);
        assert!((u.variance() / (n as f64 * d.variance()) - 1.0).abs() < 1e-3);
    }
}

#[test]
fn aliasing_guard() {
    let grid = GridSpec::new(0.0, 4.0, 512, 1024).unwrap();
    let d = discretize_fn(|x| if x <= 1.0 { 1.0 } else { 0.0 }, grid).unwrap();
    assert!(matches!(convolve_n(&d, 10), Err(rfharvest::Error::Aliasing(_))));
    assert!(convolve_n(&d, 4).is_ok());
}

#[test]
fn default_grid_examples() {
    assert_eq!(default_grid(1.0, 0.0, 4).unwrap().upper, 4.0);
    let g = default_grid(1.0, 1.0, 1).unwrap();
    assert_eq!(g.upper, 11.0);
    assert_eq!(g.intervals, 1 << 16);
    assert_eq!(g.fft_size, 1 << 17);
    assert_eq!(g.lower, 0.0);
}

#[test]
fn passage_below_smallest_harvest() {
    let grid = GridSpec::new(0.0, 2.0, 200, 512).unwrap();
    let d = discretize_fn(|x| if (0.5..=1.5).contains(&x) { 1.0 } else { 0.0 }, grid).unwrap();
    let fp = first_passage_pmf(&d, 0.1, 5).unwrap();
    assert!((fp.pmf[1] - 1.0).abs() < 1e-9);
}

#[test]
fn geometric_passage() {
    let q = 0.2;
    let grid = GridSpec::new(0.0, 2.0, 200, 512).unwrap();
    let mut values = vec![0.0; grid.nodes()];
    let g = grid.resolution();
    values[0] = (1.0 - q) / g;
    values[150] = q / g;
    let d = DiscretizedDensity::new(grid, values).unwrap();
    let fp = first_passage_adaptive(&d, 1.2, 1e-10, 100_000).unwrap();
    let e = expected_charging_blocks(&fp);
    assert!((e.mean_blocks * q - 1.0).abs() < 0.01, "{}", e.mean_blocks);
    for n in 1..20 {
        let want = (1.0 - q).powi(n as i32 - 1) * q;
        assert!((fp.pmf[n] - want).abs() < 1e-9);
    }
    assert!((expected_charging_time(&fp, 0.05) - 0.05 * e.mean_blocks).abs() < 1e-12);
}

#[test]
fn residual_shrinks_with_horizon() {
    let (_, _, dist) = rectenna_distribution(5.0);
    let grid = default_grid_with(dist.mean(), dist.variance(), 1, 4096).unwrap();
    let grid = GridSpec { upper: grid.upper.max(0.4), ..grid };
    let single = discretize(&dist, grid).unwrap();
    let mut last = f64::INFINITY;
    for n in [1usize, 5, 10, 20, 40, 80] {
        let fp = first_passage_pmf(&single, 0.324, n).unwrap();
        assert!(fp.pmf.iter().all(|&p| (0.0..=1.0).contains(&p)));
        let total: f64 = fp.pmf.iter().sum();
        assert!(total <= 1.0 + 1e-9);
        assert!(fp.residual <= last + 1e-15);
        last = fp.residual;
    }
}

#[test]
fn passage_matches_monte_carlo() {
    let (pw, rp, dist) = rectenna_distribution(5.0);
    let spec = ChargingSpec::default();
    assert!((spec.threshold_mw() - 0.324).abs() < 1e-12);
    let r = charging_analysis(&dist, &spec, 1 << 16, 1e-9, 1_000_000).unwrap();
    assert!(!r.estimate.truncated);
    let plan = SimulationPlan::new(rp, &pw, 1_000_000, 100_000, 99).unwrap();
    let mc = simulate_first_passage(&plan, r.threshold_mw).unwrap();
    assert_eq!(mc.censored, 0);
    let emp = mc.pmf();
    let n = r.passage.pmf.len().max(emp.len());
    let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    let tv = 0.5 * (1..n).map(|i| (get(&r.passage.pmf, i) - get(&emp, i)).abs()).sum::<f64>() + 0.5 * r.passage.residual;
    assert!(tv <= 0.01, "{tv}");
    let (mean, _) = mc.mean();
    assert!((r.estimate.mean_blocks / mean - 1.0).abs() < 0.02);
    assert!((r.expected_time_s - r.estimate.mean_blocks * 0.05).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn convolution_preserves_mass(m in 2.0f64..20.0, n in 1usize..12) {
        let nf = n as f64;
        let grid = GridSpec::new(0.0, nf + 12.0 * (nf / m).sqrt() + 2.0, 4096, 8192).unwrap();
        let rp = ReceivedPower::from_mean(1.0, m).unwrap();
        let d = discretize_fn(|x| rp.pdf(x), grid).unwrap();
        prop_assert!((d.mass() - 1.0).abs() < 1e-12);
        let u = convolve_n(&d, n).unwrap();
        prop_assert!((u.mass() - 1.0).abs() < 1e-6);
        prop_assert!(u.values().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn passage_is_subprobability(theta in 0.05f64..2.0, n in 1usize..30) {
        let grid = GridSpec::new(0.0, 3.0, 300, 1024).unwrap();
        let rp = ReceivedPower::from_mean(0.5, 3.0).unwrap();
        let d = discretize_fn(|x| rp.pdf(x), grid).unwrap();
        let fp = first_passage_pmf(&d, theta, n).unwrap();
        let total: f64 = fp.pmf.iter().sum();
        prop_assert!(fp.pmf.iter().all(|&p| (-1e-12..=1.0).contains(&p)));
        prop_assert!((total + fp.residual - 1.0).abs() < 1e-6);
    }
}
