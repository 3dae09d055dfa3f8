use super::{Harvester, HarvesterCurve};
use crate::channel::mw_to_dbm;
use crate::error::{domain, Error, Result};
use nalgebra::{DMatrix, DVector};

/// Harvesting efficiency as a polynomial in input power expressed in dBm,
/// valid between the sensitivity and saturation inputs.
///
/// Internally the polynomial is held in the Chebyshev basis of the dBm
/// interval mapped to `[-1, 1]`; [`EfficiencyPolynomial::coefficients`]
/// returns the equivalent plain dBm-power coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyPolynomial {
    cheb: Vec<f64>,
    dbm_lo: f64,
    dbm_hi: f64,
    max_residual: f64,
}

/// Settings for [`fit_efficiency`].
#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    /// Largest acceptable absolute efficiency residual at the datapoints.
    pub max_residual: f64,
    /// Number of points in the box-constraint grid.
    pub constraint_grid: usize,
    /// Number of points in the final verification grid.
    pub check_grid: usize,
    /// Allowed excursion outside `[0, 1]` on either grid.
    pub box_tolerance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { max_residual: 0.02, constraint_grid: 512, check_grid: 10_000, box_tolerance: 1e-12 }
    }
}

fn clenshaw(c: &[f64], t: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * t * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + c[0]
}

fn cheb_row(t: f64, n: usize) -> Vec<f64> {
    let mut row = vec![0.0; n];
    row[0] = 1.0;
    if n > 1 {
        row[1] = t;
    }
    for k in 2..n {
        row[k] = 2.0 * t * row[k - 1] - row[k - 2];
    }
    row
}

impl EfficiencyPolynomial {
    /// Builds a polynomial from Chebyshev coefficients on `[dbm_lo, dbm_hi]`.
    pub fn from_chebyshev(cheb: Vec<f64>, dbm_lo: f64, dbm_hi: f64) -> Result<Self> {
        if cheb.is_empty() || !(dbm_hi > dbm_lo) {
            return domain("efficiency polynomial needs coefficients and a nonempty dBm interval");
        }
        Ok(Self { cheb, dbm_lo, dbm_hi, max_residual: 0.0 })
    }

    pub fn degree(&self) -> usize {
        self.cheb.len() - 1
    }

    pub fn domain_dbm(&self) -> (f64, f64) {
        (self.dbm_lo, self.dbm_hi)
    }

    pub fn domain_mw(&self) -> (f64, f64) {
        (crate::channel::dbm_to_mw(self.dbm_lo), crate::channel::dbm_to_mw(self.dbm_hi))
    }

    /// Largest absolute efficiency residual over the fitted datapoints.
    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    fn to_unit(&self, dbm: f64) -> f64 {
        (2.0 * dbm - (self.dbm_lo + self.dbm_hi)) / (self.dbm_hi - self.dbm_lo)
    }

    pub fn eval_dbm(&self, dbm: f64) -> f64 {
        clenshaw(&self.cheb, self.to_unit(dbm))
    }

    /// Efficiency at input power `x` in mW.
    pub fn eval(&self, x_mw: f64) -> f64 {
        self.eval_dbm(mw_to_dbm(x_mw))
    }

    pub fn chebyshev_coefficients(&self) -> &[f64] {
        &self.cheb
    }

    /// Coefficients `w_0 .. w_W` with `e = sum_i w_i * dBm^i`.
    pub fn coefficients(&self) -> Vec<f64> {
        let n = self.cheb.len();
        // Power-basis form in the unit variable t.
        let mut tk_prev = vec![0.0; n];
        let mut tk = vec![0.0; n];
        let mut in_t = vec![0.0; n];
        tk_prev[0] = 1.0;
        in_t[0] += self.cheb[0];
        if n > 1 {
            tk[1] = 1.0;
            in_t[1] += self.cheb[1];
        }
        for k in 2..n {
            let mut next = vec![0.0; n];
            for j in 0..n - 1 {
                next[j + 1] += 2.0 * tk[j];
            }
            for j in 0..n {
                next[j] -= tk_prev[j];
            }
            for j in 0..n {
                in_t[j] += self.cheb[k] * next[j];
            }
            tk_prev = std::mem::replace(&mut tk, next);
        }
        // Substitute t = alpha * dBm + beta.
        let alpha = 2.0 / (self.dbm_hi - self.dbm_lo);
        let beta = -(self.dbm_lo + self.dbm_hi) / (self.dbm_hi - self.dbm_lo);
        let mut out = vec![0.0; n];
        let mut binom = vec![1.0; n];
        for (k, &ck) in in_t.iter().enumerate() {
            // binom holds C(k, j) for j <= k.
            if k > 0 {
                for j in (1..k).rev() {
                    binom[j] += binom[j - 1];
                }
                binom[k] = 1.0;
            }
            for j in 0..=k {
                out[j] += ck * binom[j] * alpha.powi(j as i32) * beta.powi((k - j) as i32);
            }
        }
        out
    }
}

/// Constrained least-squares fit of the efficiency samples of `curve`
/// against input dBm with a degree-`degree` polynomial, subject to zero
/// efficiency at the sensitivity and `0 <= e <= 1` across the domain.
pub fn fit_efficiency(curve: &HarvesterCurve, degree: usize, opts: FitOptions) -> Result<EfficiencyPolynomial> {
    let samples = curve.efficiency_samples();
    if samples.len() < degree + 2 {
        return domain(format!("degree {degree} needs at least {} points, curve has {}", degree + 2, samples.len()));
    }
    let lo = samples[0].0;
    let hi = samples[samples.len() - 1].0;
    let n = degree + 1;
    let unit = |d: f64| (2.0 * d - (lo + hi)) / (hi - lo);
    let a = DMatrix::from_fn(samples.len(), n, |i, j| cheb_row(unit(samples[i].0), n)[j]);
    let e = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.1));
    let ata = a.transpose() * &a;
    let ate = a.transpose() * &e;

    let grid = |count: usize| -> Vec<f64> { (0..count).map(|k| -1.0 + 2.0 * k as f64 / (count - 1) as f64).collect() };
    let mut check: Vec<f64> = grid(opts.constraint_grid.max(2));
    check.extend(grid(opts.check_grid.max(2)));

    let mut equalities: Vec<(f64, f64)> = vec![(-1.0, 0.0)];
    for _ in 0..=4 * n {
        let k = equalities.len();
        if k > n {
            return Err(Error::FitInfeasible(format!(
                "box constraints need more than {n} active points at degree {degree}"
            )));
        }
        let mut kkt = DMatrix::zeros(n + k, n + k);
        kkt.view_mut((0, 0), (n, n)).copy_from(&(2.0 * &ata));
        let mut rhs = DVector::zeros(n + k);
        rhs.rows_mut(0, n).copy_from(&(2.0 * &ate));
        for (r, &(t, target)) in equalities.iter().enumerate() {
            let row = cheb_row(t, n);
            for j in 0..n {
                kkt[(n + r, j)] = row[j];
                kkt[(j, n + r)] = row[j];
            }
            rhs[n + r] = target;
        }
        let sol = kkt
            .full_piv_lu()
            .solve(&rhs)
            .ok_or_else(|| Error::FitInfeasible("singular constrained least-squares system".into()))?;
        let w: Vec<f64> = sol.rows(0, n).iter().copied().collect();

        let mut worst: Option<(f64, f64, f64)> = None;
        for &t in &check {
            let v = clenshaw(&w, t);
            let (excess, target) = if v < -opts.box_tolerance {
                (-v, 0.0)
            } else if v > 1.0 + opts.box_tolerance {
                (v - 1.0, 1.0)
            } else {
                continue;
            };
            if worst.is_none_or(|(x, _, _)| excess > x) {
                worst = Some((excess, t, target));
            }
        }
        match worst {
            None => {
                let fitted = &a * DVector::from_column_slice(&w);
                let max_residual = (fitted - &e).amax();
                if max_residual > opts.max_residual {
                    return Err(Error::FitInfeasible(format!(
                        "max efficiency residual {max_residual:.3e} exceeds tolerance {:.3e}",
                        opts.max_residual
                    )));
                }
                return Ok(EfficiencyPolynomial { cheb: w, dbm_lo: lo, dbm_hi: hi, max_residual });
            }
            Some((_, t, target)) => {
                if equalities.iter().any(|&(s, _)| s == t) {
                    return Err(Error::FitInfeasible("box constraints could not be satisfied".into()));
                }
                equalities.push((t, target));
            }
        }
    }
    Err(Error::FitInfeasible("active-set refinement did not settle".into()))
}

/// The measured-curve model: zero below sensitivity, `e(x) x` in between,
/// and constant above saturation.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    sensitivity_mw: f64,
    saturation_mw: f64,
    efficiency: EfficiencyPolynomial,
}

impl GroundTruth {
    pub fn new(efficiency: EfficiencyPolynomial) -> Self {
        let (sensitivity_mw, saturation_mw) = efficiency.domain_mw();
        Self { sensitivity_mw, saturation_mw, efficiency }
    }

    /// Fits the efficiency of `curve` and wraps it.
    pub fn fit(curve: &HarvesterCurve, degree: usize) -> Result<Self> {
        Ok(Self::new(fit_efficiency(curve, degree, FitOptions::default())?))
    }

    pub fn efficiency(&self) -> &EfficiencyPolynomial {
        &self.efficiency
    }

    pub fn sensitivity_mw(&self) -> f64 {
        self.sensitivity_mw
    }

    pub fn saturation_mw(&self) -> f64 {
        self.saturation_mw
    }
}

impl Harvester for GroundTruth {
    fn power(&self, x: f64) -> f64 {
        if x <= self.sensitivity_mw {
            0.0
        } else if x >= self.saturation_mw {
            self.efficiency.eval_dbm(self.efficiency.dbm_hi) * self.saturation_mw
        } else {
            self.efficiency.eval(x) * x
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![self.sensitivity_mw, self.saturation_mw]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clenshaw_matches_rows() {
        let c = [0.3, -0.2, 0.5, 0.1];
        for &t in &[-1.0, -0.3, 0.0, 0.7, 1.0] {
            let direct: f64 = cheb_row(t, 4).iter().zip(c).map(|(r, ci)| r * ci).sum();
            assert!((clenshaw(&c, t) - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn monomial_conversion() {
        let p = EfficiencyPolynomial::from_chebyshev(vec![0.1, 0.2, 0.3, -0.05], -20.0, 10.0).unwrap();
        let w = p.coefficients();
        for &d in &[-20.0, -7.5, 0.0, 3.3, 10.0] {
            let direct: f64 = w.iter().enumerate().map(|(i, wi)| wi * f64::powi(d, i as i32)).sum();
            assert!((direct - p.eval_dbm(d)).abs() < 1e-13, "{d}");
        }
    }

    #[test]
    fn constant_fit_is_infeasible() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| {
            let x = 0.1 * (1.0 + i as f64);
            (x, if i == 0 { 0.0 } else { 0.4 * x })
        }).collect();
        let c = HarvesterCurve::new(pts).unwrap();
        assert!(matches!(fit_efficiency(&c, 0, FitOptions::default()), Err(Error::FitInfeasible(_))));
    }
}
