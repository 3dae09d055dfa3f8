//! Success probability of a backscatter round trip as the tag's power
//! consumption grows, in closed form and by Monte Carlo.

use rfharvest::channel::{FadingChannel, LinkBudget};
use rfharvest::config::Sweep;
use rfharvest::harvester::{Dataset, GroundTruth, PiecewiseLinear, Spacing};
use rfharvest::rfid::{success_probability, success_probability_mc, RfidScenario};

fn main() -> rfharvest::Result<()> {
    let truth = GroundTruth::fit(&Dataset::RectennaA.curve(), Dataset::RectennaA.fit_degree())?;
    let pw = PiecewiseLinear::from_function(&truth, truth.sensitivity_mw(), truth.saturation_mw(), 585, Spacing::UniformDb)?;
    let ch = FadingChannel::default();
    let base = RfidScenario::default();
    for (p, d) in [(1500.0, 5.0), (3000.0, 5.0)] {
        let link = LinkBudget::new(p, d)?;
        println!("P_T = {p} mW, d = {d} m, BER-limited input threshold {:.3e} mW", base.ber_power_threshold(&link));
        println!("  P_c_mW,closed_form,monte_carlo");
        for pc in Sweep::log(1e-4, 1e-1, 7).values() {
            let scn = base.with_consumption(pc);
            let closed = success_probability(&scn, &link, &ch, &pw)?;
            let mc = success_probability_mc(&scn, &link, &ch, &pw, 200_000, 5)?;
            println!("  {pc:.3e},{closed:.5},{:.5}", mc.success_frequency());
        }
    }
    Ok(())
}
