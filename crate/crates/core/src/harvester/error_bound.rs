use super::{Harvester, PiecewiseLinear};
use crate::error::{domain, Result};
use crate::quadrature::{integrate, QuadOptions};

/// Integrated approximation error of a piecewise-linear model together
/// with the curvature-based bound for uniform supports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproximationError {
    /// `int |p(x) - p~(x)| dx` over the model's input range, in mW^2.
    pub integrated: f64,
    /// `C_p (sat - sen)^3 / (8 M^2)`.
    pub bound: f64,
    /// Estimated `max |p''|` over the input range.
    pub c_p: f64,
    pub segments: usize,
}

/// Estimates `max |p''|` on `[lo, hi]` from second central differences on
/// a uniform grid of `points` nodes.
pub fn second_derivative_bound<H: Harvester + ?Sized>(p: &H, lo: f64, hi: f64, points: usize) -> f64 {
    let n = points.max(3);
    let h = (hi - lo) / (n - 1) as f64;
    let vals: Vec<f64> = (0..n).map(|i| p.power(lo + h * i as f64)).collect();
    vals.windows(3).map(|w| (w[2] - 2.0 * w[1] + w[0]).abs()).fold(0.0, f64::max) / (h * h)
}

/// Compares `approx` against `truth` over `[b_0, b_M]`.
pub fn approximation_error<H: Harvester + ?Sized>(
    truth: &H,
    approx: &PiecewiseLinear,
    rel_tol: f64,
) -> Result<ApproximationError> {
    let (lo, hi) = (approx.sensitivity_mw(), approx.saturation_mw());
    if !(rel_tol > 0.0) {
        return domain("relative tolerance must be positive");
    }
    let mut cuts = approx.breakpoints();
    cuts.extend(truth.breakpoints());
    let abs_tol = 1e-15 * (hi - lo) * approx.max_output();
    let opts = QuadOptions { rel_tol, abs_tol, max_intervals: 200_000 };
    let r = integrate(|x| (truth.power(x) - approx.power(x)).abs(), lo, hi, &cuts, opts)?;
    let c_p = second_derivative_bound(truth, lo, hi, 10_000);
    let m = approx.segments() as f64;
    Ok(ApproximationError {
        integrated: r.value,
        bound: c_p * (hi - lo).powi(3) / (8.0 * m * m),
        c_p,
        segments: approx.segments(),
    })
}
