//! Expected number of coherence blocks needed to charge a capacitor to
//! 1.8 V, from the first-passage distribution of the accumulated harvest.

use rfharvest::channel::{FadingChannel, LinkBudget, ReceivedPower};
use rfharvest::density::{charging_analysis, ChargingSpec};
use rfharvest::harvester::{Dataset, GroundTruth, PiecewiseLinear, Spacing};
use rfharvest::montecarlo::{simulate_first_passage, SimulationPlan};
use rfharvest::stats::HarvestedPowerDistribution;

fn main() -> rfharvest::Result<()> {
    let truth = GroundTruth::fit(&Dataset::RectennaA.curve(), Dataset::RectennaA.fit_degree())?;
    let pw = PiecewiseLinear::from_function(&truth, truth.sensitivity_mw(), truth.saturation_mw(), 585, Spacing::UniformDb)?;
    println!("C_uF,d_m,threshold_mW,E[N*],E[N*]_mc,P(N*=1),expected_time_s");
    for cap in [1.0, 10.0, 20.0] {
        let spec = ChargingSpec { capacitance_uf: cap, ..ChargingSpec::default() };
        for d in [2.0, 4.0, 6.0] {
            let rp = ReceivedPower::new(&LinkBudget::new(1500.0, d)?, &FadingChannel::default())?;
            let dist = HarvestedPowerDistribution::new(&pw, rp);
            let r = charging_analysis(&dist, &spec, 1 << 14, 1e-8, 100_000)?;
            let mc = simulate_first_passage(&SimulationPlan::new(rp, &pw, 50_000, 100_000, 3)?, r.threshold_mw)?;
            println!(
                "{cap},{d},{:.4},{:.4},{:.4},{:.4},{:.4}",
                r.threshold_mw,
                r.estimate.mean_blocks,
                mc.mean().0,
                r.passage.pmf[1],
                r.expected_time_s
            );
        }
    }
    Ok(())
}
