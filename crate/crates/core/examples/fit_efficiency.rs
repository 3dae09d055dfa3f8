//! Fits the efficiency polynomial of both bundled datasets and prints the
//! worst residual and a few sampled values of the ground-truth model.

use rfharvest::harvester::{Dataset, GroundTruth, Harvester};

fn main() -> rfharvest::Result<()> {
    for ds in Dataset::ALL {
        let curve = ds.curve();
        let truth = GroundTruth::fit(&curve, ds.fit_degree())?;
        let e = truth.efficiency();
        println!(
            "{ds}: {} points, degree {}, max residual {:.3e}",
            curve.len(),
            e.degree(),
            e.max_residual()
        );
        for x in [truth.sensitivity_mw() * 2.0, 0.1, 1.0, truth.saturation_mw()] {
            println!("  p({x:.4e} mW) = {:.6e} mW", truth.power(x));
        }
    }
    Ok(())
}
