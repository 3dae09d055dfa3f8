//! Loads a harvester curve from CSV (here written to a temporary file),
//! builds the piecewise-linear model straight from the measured points and
//! reports its outage and expected output at a few distances.

use rfharvest::channel::{FadingChannel, LinkBudget, ReceivedPower};
use rfharvest::harvester::{HarvesterCurve, InvertibleHarvester, PiecewiseLinear};
use rfharvest::stats::{expected_power_piecewise, sensitivity_outage};

const CSV: &str = "\
# measured rectifier, input and output in dBm
input_dbm,output_dbm
-20,-inf
-15,-24.1
-10,-15.2
-5,-8.6
0,-3.4
5,1.2
10,5.1
15,7.9
";

fn main() -> rfharvest::Result<()> {
    let path = std::env::temp_dir().join("rfharvest_example_curve.csv");
    std::fs::write(&path, CSV)?;
    let curve = HarvesterCurve::load_csv(&path)?;
    let model = PiecewiseLinear::from_curve(&curve)?;
    println!(
        "{} points, sensitivity {:.3e} mW, plateau {:.3e} mW",
        curve.len(),
        model.sensitivity_mw(),
        model.plateau()
    );
    let ch = FadingChannel::default();
    println!("d_m,outage,expected_output_mW");
    for d in [1.0, 2.0, 4.0, 8.0] {
        let link = LinkBudget::new(2000.0, d)?;
        let rp = ReceivedPower::new(&link, &ch)?;
        println!(
            "{d},{:.5},{:.5e}",
            sensitivity_outage(&link, &ch, model.sensitivity_mw())?,
            expected_power_piecewise(&rp, &model)
        );
    }
    Ok(())
}
