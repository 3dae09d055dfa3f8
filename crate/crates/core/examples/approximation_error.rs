//! Integrated error of the piecewise-linear model against the smooth ground
//! truth as the number of segments doubles, next to the curvature bound.

use rfharvest::harvester::{approximation_error, Dataset, GroundTruth, PiecewiseLinear, Spacing};

fn main() -> rfharvest::Result<()> {
    for ds in Dataset::ALL {
        let truth = GroundTruth::fit(&ds.curve(), ds.fit_degree())?;
        println!("{ds}\n  M,error_mW2,bound_mW2,ratio_to_previous");
        let mut prev: Option<f64> = None;
        for m in [25, 50, 100, 200, 400] {
            let pw = PiecewiseLinear::from_function(&truth, truth.sensitivity_mw(), truth.saturation_mw(), m, Spacing::UniformLinear)?;
            let e = approximation_error(&truth, &pw, 1e-10)?;
            let ratio = prev.map_or(f64::NAN, |p| p / e.integrated);
            println!("  {m},{:.4e},{:.4e},{ratio:.3}", e.integrated, e.bound);
            prev = Some(e.integrated);
        }
    }
    Ok(())
}
