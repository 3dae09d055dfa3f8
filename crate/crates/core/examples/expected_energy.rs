//! Expected harvested power of the piecewise-linear model in closed form,
//! against quadrature of the ground truth, the simple baselines and Monte
//! Carlo, over distance.

use rfharvest::channel::{FadingChannel, LinkBudget, ReceivedPower};
use rfharvest::harvester::{ConstantLinear, ConstantLinearConstant, Dataset, GroundTruth, PiecewiseLinear, Spacing};
use rfharvest::montecarlo::{simulate_energy, SimulationPlan};
use rfharvest::stats::{expected_power_cl, expected_power_clc, expected_power_numeric, expected_power_piecewise};

fn main() -> rfharvest::Result<()> {
    let truth = GroundTruth::fit(&Dataset::RectennaA.curve(), Dataset::RectennaA.fit_degree())?;
    let (sen, sat) = (truth.sensitivity_mw(), truth.saturation_mw());
    let pw = PiecewiseLinear::from_function(&truth, sen, sat, 585, Spacing::UniformDb)?;
    let cl = ConstantLinear::new(0.43, sen)?;
    let clc = ConstantLinearConstant::new(0.43, sen, sat)?;
    println!("d_m,truth_quadrature,piecewise_closed_form,constant_linear,constant_linear_constant,piecewise_mc,mc_se");
    for d in [2.0, 4.0, 6.0, 8.0, 10.0] {
        let rp = ReceivedPower::new(&LinkBudget::new(2000.0, d)?, &FadingChannel::default())?;
        let plan = SimulationPlan::new(rp, &pw, 1_000_000, 1, 11)?;
        let mc = simulate_energy(&plan, 1.0)?;
        println!(
            "{d},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.1e}",
            expected_power_numeric(&rp, &truth, 1e-10)?,
            expected_power_piecewise(&rp, &pw),
            expected_power_cl(&rp, &cl),
            expected_power_clc(&rp, &clc),
            mc.mean,
            mc.std_error
        );
    }
    Ok(())
}
