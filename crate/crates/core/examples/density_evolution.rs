//! Distribution of the harvested power accumulated over N coherence blocks,
//! by FFT density evolution, compared against Monte Carlo.

use rfharvest::channel::{FadingChannel, LinkBudget, ReceivedPower};
use rfharvest::density::{cdf_from_density, convolve_n, default_grid, discretize};
use rfharvest::harvester::{Dataset, GroundTruth, PiecewiseLinear, Spacing};
use rfharvest::montecarlo::{simulate_u_n, SimulationPlan};
use rfharvest::stats::HarvestedPowerDistribution;

fn main() -> rfharvest::Result<()> {
    let curve = Dataset::RectennaA.curve();
    let truth = GroundTruth::fit(&curve, Dataset::RectennaA.fit_degree())?;
    let model = PiecewiseLinear::from_function(&truth, truth.sensitivity_mw(), truth.saturation_mw(), 1170, Spacing::UniformDb)?;
    let link = LinkBudget::new(1500.0, 5.0)?;
    let rp = ReceivedPower::new(&link, &FadingChannel::default())?;
    let dist = HarvestedPowerDistribution::new(&model, rp);

    println!("N,median_mw,p95_mw,mc_median_mw");
    for n in [1usize, 20, 50] {
        let t = std::time::Instant::now();
        let grid = default_grid(dist.mean(), dist.variance(), n)?;
        let single = discretize(&dist, grid)?;
        let u_n = convolve_n(&single, n)?;
        let f = cdf_from_density(&u_n);
        let quantile = |q: f64| u_n.grid().node(f.partition_point(|&c| c < q));
        let edges: Vec<f64> = (0..=400).map(|k| grid.upper * k as f64 / 400.0).collect();
        let plan = SimulationPlan::new(rp, &model, 100_000, n, 7)?;
        let h = simulate_u_n(&plan, &edges)?;
        let mut acc = 0.0;
        let mc_median = h
            .probabilities()
            .iter()
            .position(|p| {
                acc += p;
                acc >= 0.5
            })
            .map_or(f64::NAN, |k| edges[k + 1]);
        println!("{n},{:.6e},{:.6e},{:.6e}  ({:?})", quantile(0.5), quantile(0.95), mc_median, t.elapsed());
    }
    Ok(())
}
