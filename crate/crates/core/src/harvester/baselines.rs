use super::{Harvester, InvertibleHarvester};
use crate::error::{domain, Result};

fn check_eta(eta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&eta) {
        return domain(format!("efficiency must lie in [0, 1), got {eta}"));
    }
    Ok(())
}

/// `p(x) = eta x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linear {
    pub eta: f64,
}

impl Linear {
    pub fn new(eta: f64) -> Result<Self> {
        check_eta(eta)?;
        Ok(Self { eta })
    }
}

impl Harvester for Linear {
    fn power(&self, x: f64) -> f64 {
        self.eta * x.max(0.0)
    }
}

impl InvertibleHarvester for Linear {
    fn plateau(&self) -> f64 {
        if self.eta > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    }

    fn inverse(&self, y: f64) -> Option<f64> {
        (y > 0.0 && self.eta > 0.0).then(|| y / self.eta)
    }
}

/// `p(x) = eta (x - sensitivity)` above the sensitivity, zero below.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantLinear {
    pub eta: f64,
    pub sensitivity_mw: f64,
}

impl ConstantLinear {
    pub fn new(eta: f64, sensitivity_mw: f64) -> Result<Self> {
        check_eta(eta)?;
        if !(sensitivity_mw >= 0.0) {
            return domain("sensitivity must be non-negative");
        }
        Ok(Self { eta, sensitivity_mw })
    }
}

impl Harvester for ConstantLinear {
    fn power(&self, x: f64) -> f64 {
        self.eta * (x - self.sensitivity_mw).max(0.0)
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![self.sensitivity_mw]
    }
}

impl InvertibleHarvester for ConstantLinear {
    fn plateau(&self) -> f64 {
        if self.eta > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    }

    fn inverse(&self, y: f64) -> Option<f64> {
        (y > 0.0 && self.eta > 0.0).then(|| self.sensitivity_mw + y / self.eta)
    }
}

/// [`ConstantLinear`] clamped at `eta (saturation - sensitivity)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantLinearConstant {
    pub eta: f64,
    pub sensitivity_mw: f64,
    pub saturation_mw: f64,
}

impl ConstantLinearConstant {
    pub fn new(eta: f64, sensitivity_mw: f64, saturation_mw: f64) -> Result<Self> {
        check_eta(eta)?;
        if !(sensitivity_mw >= 0.0 && saturation_mw > sensitivity_mw) {
            return domain("need 0 <= sensitivity < saturation");
        }
        Ok(Self { eta, sensitivity_mw, saturation_mw })
    }
}

impl Harvester for ConstantLinearConstant {
    fn power(&self, x: f64) -> f64 {
        self.eta * (x.min(self.saturation_mw) - self.sensitivity_mw).max(0.0)
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![self.sensitivity_mw, self.saturation_mw]
    }
}

impl InvertibleHarvester for ConstantLinearConstant {
    fn plateau(&self) -> f64 {
        self.eta * (self.saturation_mw - self.sensitivity_mw)
    }

    fn inverse(&self, y: f64) -> Option<f64> {
        (y > 0.0 && y < self.plateau()).then(|| self.sensitivity_mw + y / self.eta)
    }
}

/// Picks the efficiency in `grid` minimizing a caller-chosen mismatch
/// objective. Returns the best value and its objective.
pub fn grid_search_eta(grid: &[f64], objective: impl Fn(f64) -> f64) -> Option<(f64, f64)> {
    grid.iter()
        .map(|&eta| (eta, objective(eta)))
        .filter(|(_, v)| v.is_finite())
        .min_by(|a, b| a.1.total_cmp(&b.1))
}
