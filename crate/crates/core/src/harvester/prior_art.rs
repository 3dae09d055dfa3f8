use super::{Harvester, HarvesterCurve};
use crate::error::{domain, Error, Result};
use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

/// Normalized logistic model
/// `M (s(a(x - b)) - s(-ab)) / s(ab)` with `s` the logistic function:
/// zero output at zero input, tending to `saturation_mw` for large input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sigmoid {
    pub saturation_mw: f64,
    /// Steepness in 1/mW.
    pub steepness: f64,
    /// Center in mW.
    pub center_mw: f64,
}

impl Sigmoid {
    pub fn new(saturation_mw: f64, steepness: f64, center_mw: f64) -> Result<Self> {
        if !(saturation_mw > 0.0 && steepness > 0.0 && center_mw.is_finite()) {
            return domain("sigmoid needs positive saturation and steepness");
        }
        Ok(Self { saturation_mw, steepness, center_mw })
    }

    /// `ln` of the normalized shape `(s(a(x-b)) - s(-ab)) / s(ab)` for
    /// `x > 0`, written as `sinh(ax/2) e^(-ab/2) / cosh(a(x-b)/2)` so that
    /// no difference of nearly equal logistics is formed.
    fn ln_shape(&self, x: f64) -> f64 {
        let (a, b) = (self.steepness, self.center_mw);
        let y = 0.5 * a * x;
        let w = (0.5 * a * (x - b)).abs();
        let ln_sinh = y + (-(-2.0 * y).exp_m1()).ln();
        let ln_cosh = w + (-2.0 * w).exp().ln_1p();
        ln_sinh - 0.5 * a * b - ln_cosh
    }

    /// Value and gradient with respect to (saturation, steepness, center).
    fn value_and_gradient(&self, x: f64) -> (f64, Vector3<f64>) {
        if x <= 0.0 {
            return (0.0, Vector3::zeros());
        }
        let (m, a, b) = (self.saturation_mw, self.steepness, self.center_mw);
        let shape = self.ln_shape(x).exp();
        let t = (0.5 * a * (x - b)).tanh();
        let dl_da = 0.5 * x / (0.5 * a * x).tanh() - 0.5 * b - 0.5 * (x - b) * t;
        let dl_db = -0.5 * a + 0.5 * a * t;
        (m * shape, Vector3::new(shape, m * shape * dl_da, m * shape * dl_db))
    }
}

impl Harvester for Sigmoid {
    fn power(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.saturation_mw * self.ln_shape(x).exp()
    }
}

/// Second-order polynomial in mW. Negative outputs are kept as is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadratic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Harvester for Quadratic {
    fn power(&self, x: f64) -> f64 {
        (self.a * x + self.b) * x + self.c
    }
}

/// Linear least-squares quadratic through the curve's datapoints.
pub fn fit_quadratic(curve: &HarvesterCurve) -> Result<Quadratic> {
    let pts = curve.points();
    if pts.len() < 3 {
        return domain("a quadratic fit needs at least three points");
    }
    let a = DMatrix::from_fn(pts.len(), 3, |i, j| pts[i].0.powi(2 - j as i32));
    let y = DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1));
    let sol = a
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|e| Error::FitInfeasible(format!("quadratic least squares failed: {e}")))?;
    Ok(Quadratic { a: sol[0], b: sol[1], c: sol[2] })
}

/// Levenberg-Marquardt fit of [`Sigmoid`] to the curve's datapoints.
pub fn fit_sigmoid(curve: &HarvesterCurve) -> Result<Sigmoid> {
    let pts = curve.points();
    if pts.len() < 3 {
        return domain("a sigmoid fit needs at least three points");
    }
    let ymax = pts.iter().map(|p| p.1).fold(0.0, f64::max);
    if !(ymax > 0.0) {
        return domain("a sigmoid fit needs some positive output");
    }
    let crossing = |frac: f64| {
        pts.iter().find(|p| p.1 >= frac * ymax).map(|p| p.0).unwrap_or(pts[pts.len() - 1].0)
    };
    let (x25, x50, x75) = (crossing(0.25), crossing(0.5), crossing(0.75));
    let spread = (x75 - x25).max(1e-6 * x50.max(1e-12));
    let mut model = Sigmoid::new(1.05 * ymax, 4.0 / spread, x50)?;

    let sse = |s: &Sigmoid| pts.iter().map(|&(x, y)| (s.power(x) - y).powi(2)).sum::<f64>();
    let mut cost = sse(&model);
    let mut lambda = 1e-3;
    for _ in 0..5_000 {
        let mut jtj = Matrix3::zeros();
        let mut jtr = Vector3::zeros();
        for &(x, y) in pts {
            let (v, g) = model.value_and_gradient(x);
            jtj += g * g.transpose();
            jtr += g * (v - y);
        }
        if jtr.amax() == 0.0 || cost == 0.0 {
            return Ok(model);
        }
        let mut accepted = false;
        while lambda < 1e30 {
            let mut damped = jtj;
            for i in 0..3 {
                damped[(i, i)] += lambda * jtj[(i, i)].max(1e-300);
            }
            let Some(step) = damped.lu().solve(&(-jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let trial = Sigmoid {
                saturation_mw: model.saturation_mw + step[0],
                steepness: model.steepness + step[1],
                center_mw: model.center_mw + step[2],
            };
            if trial.saturation_mw > 0.0 && trial.steepness > 0.0 {
                let c = sse(&trial);
                if c.is_finite() && c <= cost {
                    let rel_step = (step[0] / model.saturation_mw)
                        .abs()
                        .max((step[1] / model.steepness).abs())
                        .max((step[2] / model.center_mw.abs().max(1e-300)).abs());
                    let improvement = cost - c;
                    model = trial;
                    cost = c;
                    lambda = (lambda / 3.0).max(1e-15);
                    accepted = true;
                    if rel_step < 1e-15 || improvement <= 1e-30 * cost.max(1e-300) {
                        return Ok(model);
                    }
                    break;
                }
            }
            lambda *= 4.0;
        }
        if !accepted {
            // No descent direction left at any damping: a stationary point.
            return Ok(model);
        }
    }
    Err(Error::FitDivergence("Levenberg-Marquardt iteration budget exhausted".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_limits() {
        let s = Sigmoid::new(5.0, 2.0, 1.5).unwrap();
        assert!(s.power(0.0).abs() < 1e-15);
        assert!((s.power(1e3) - 5.0).abs() < 1e-12);
        assert!(s.power(10.0) < 5.0);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let s = Sigmoid::new(3.0, 1.7, 0.8).unwrap();
        let x = 1.1;
        let (_, g) = s.value_and_gradient(x);
        let h = 1e-6;
        let fd = [
            (Sigmoid { saturation_mw: 3.0 + h, ..s }.power(x) - Sigmoid { saturation_mw: 3.0 - h, ..s }.power(x)) / (2.0 * h),
            (Sigmoid { steepness: 1.7 + h, ..s }.power(x) - Sigmoid { steepness: 1.7 - h, ..s }.power(x)) / (2.0 * h),
            (Sigmoid { center_mw: 0.8 + h, ..s }.power(x) - Sigmoid { center_mw: 0.8 - h, ..s }.power(x)) / (2.0 * h),
        ];
        for i in 0..3 {
            assert!((g[i] - fd[i]).abs() < 1e-7, "{i}: {} vs {}", g[i], fd[i]);
        }
    }

    #[test]
    fn quadratic_exact_recovery() {
        // (x - 0.1)(0.6 - 0.01 x): zero at the first input, increasing after.
        let q = Quadratic { a: -0.01, b: 0.601, c: -0.06 };
        let pts: Vec<(f64, f64)> = (0..20).map(|i| 0.1 + 0.5 * i as f64).map(|x| (x, if x == 0.1 { 0.0 } else { q.power(x) })).collect();
        let f = fit_quadratic(&HarvesterCurve::new(pts).unwrap()).unwrap();
        assert!((f.a - q.a).abs() < 1e-12 && (f.b - q.b).abs() < 1e-12 && (f.c - q.c).abs() < 1e-12);
    }
}
