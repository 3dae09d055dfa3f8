//! Fits the logistic and quadratic harvesting models used in earlier work
//! and compares them with the measured points.

use rfharvest::harvester::{fit_quadratic, fit_sigmoid, Dataset, Harvester};

fn main() -> rfharvest::Result<()> {
    for ds in Dataset::ALL {
        let curve = ds.curve();
        let sig = fit_sigmoid(&curve)?;
        let quad = fit_quadratic(&curve)?;
        println!("{ds}: sigmoid {sig:?}\n  quadratic {quad:?}");
        println!("  input_mW,measured_mW,sigmoid_mW,quadratic_mW");
        for &(x, y) in curve.points().iter().step_by(curve.len() / 6) {
            println!("  {x:.4e},{y:.4e},{:.4e},{:.4e}", sig.power(x), quad.power(x));
        }
    }
    Ok(())
}
