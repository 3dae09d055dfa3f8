//! Harvested-power functions `p(x)` mapping RF input power (mW) to DC output
//! power (mW).

mod baselines;
mod curve;
pub mod datasets;
mod error_bound;
mod fit;
mod piecewise;
mod prior_art;

pub use baselines::{grid_search_eta, ConstantLinear, ConstantLinearConstant, Linear};
pub use curve::HarvesterCurve;
pub use datasets::Dataset;
pub use error_bound::{approximation_error, second_derivative_bound, ApproximationError};
pub use fit::{fit_efficiency, EfficiencyPolynomial, FitOptions, GroundTruth};
pub use piecewise::{PiecewiseLinear, Spacing};
pub use prior_art::{fit_quadratic, fit_sigmoid, Quadratic, Sigmoid};

/// A nondecreasing harvesting characteristic.
pub trait Harvester: Send + Sync {
    /// Output power in mW for input power `x` in mW.
    fn power(&self, x: f64) -> f64;

    /// Inputs where the function has kinks; quadrature splits there.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl<F> Harvester for F
where
    F: Fn(f64) -> f64 + Send + Sync,
{
    fn power(&self, x: f64) -> f64 {
        self(x)
    }
}

/// A harvester that is strictly increasing between its sensitivity and its
/// plateau, so that a power target has a unique preimage.
pub trait InvertibleHarvester: Harvester {
    /// Supremum of the output; `f64::INFINITY` for unbounded models.
    fn plateau(&self) -> f64;

    /// Preimage of `y` on the increasing branch, or `None` when `y` is not
    /// attainable there.
    fn inverse(&self, y: f64) -> Option<f64>;
}

/// Every model the command line can select, behind one type.
#[derive(Debug, Clone)]
pub enum HarvesterModel {
    GroundTruth(GroundTruth),
    Piecewise(PiecewiseLinear),
    Linear(Linear),
    ConstantLinear(ConstantLinear),
    ConstantLinearConstant(ConstantLinearConstant),
    Sigmoid(Sigmoid),
    Quadratic(Quadratic),
}

impl HarvesterModel {
    pub fn name(&self) -> &'static str {
        match self {
            HarvesterModel::GroundTruth(_) => "ground_truth",
            HarvesterModel::Piecewise(_) => "piecewise",
            HarvesterModel::Linear(_) => "linear",
            HarvesterModel::ConstantLinear(_) => "constant_linear",
            HarvesterModel::ConstantLinearConstant(_) => "constant_linear_constant",
            HarvesterModel::Sigmoid(_) => "sigmoid",
            HarvesterModel::Quadratic(_) => "quadratic",
        }
    }

    fn inner(&self) -> &dyn Harvester {
        match self {
            HarvesterModel::GroundTruth(h) => h,
            HarvesterModel::Piecewise(h) => h,
            HarvesterModel::Linear(h) => h,
            HarvesterModel::ConstantLinear(h) => h,
            HarvesterModel::ConstantLinearConstant(h) => h,
            HarvesterModel::Sigmoid(h) => h,
            HarvesterModel::Quadratic(h) => h,
        }
    }

    /// The invertible view, for models that admit one.
    pub fn as_invertible(&self) -> Option<&dyn InvertibleHarvester> {
        match self {
            HarvesterModel::Piecewise(h) => Some(h),
            HarvesterModel::Linear(h) => Some(h),
            HarvesterModel::ConstantLinear(h) => Some(h),
            HarvesterModel::ConstantLinearConstant(h) => Some(h),
            _ => None,
        }
    }
}

impl Harvester for HarvesterModel {
    fn power(&self, x: f64) -> f64 {
        self.inner().power(x)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.inner().breakpoints()
    }
}
