//! Path loss, Nakagami-m block fading, and the received input power
//! `P_R = P(d) * gamma` seen by the harvester.
//!
//! Powers are linear milliwatts everywhere; see [`dbm_to_mw`] and
//! [`mw_to_dbm`] for the boundary conversions.

use crate::error::{domain, Result};
use crate::rng::GammaSampler;
use crate::special::{gamma_unchecked, ln_gamma_unchecked, reg_lower_unchecked, reg_upper_unchecked};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Wavelength of the 868 MHz band used by the default scenarios, in meters.
pub const DEFAULT_WAVELENGTH_M: f64 = 0.3456;
pub const DEFAULT_PATH_LOSS_EXPONENT: f64 = 2.1;
pub const DEFAULT_NAKAGAMI_M: f64 = 5.0;

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// Transmitter power and geometry of a single link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub transmit_power_mw: f64,
    pub distance_m: f64,
    pub path_loss_exponent: f64,
    pub wavelength_m: f64,
    pub reference_distance_m: f64,
}

impl LinkBudget {
    pub fn new(transmit_power_mw: f64, distance_m: f64) -> Result<Self> {
        let l = Self {
            transmit_power_mw,
            distance_m,
            path_loss_exponent: DEFAULT_PATH_LOSS_EXPONENT,
            wavelength_m: DEFAULT_WAVELENGTH_M,
            reference_distance_m: 1.0,
        };
        l.validate()?;
        Ok(l)
    }

    pub fn with_exponent(mut self, nu: f64) -> Result<Self> {
        self.path_loss_exponent = nu;
        self.validate()?;
        Ok(self)
    }

    pub fn at_distance(mut self, d: f64) -> Result<Self> {
        self.distance_m = d;
        self.validate()?;
        Ok(self)
    }

    pub fn with_transmit_power(mut self, p_mw: f64) -> Result<Self> {
        self.transmit_power_mw = p_mw;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.transmit_power_mw > 0.0
            && self.reference_distance_m > 0.0
            && self.distance_m >= self.reference_distance_m
            && self.path_loss_exponent > 0.0
            && self.wavelength_m > 0.0
            && self.transmit_power_mw.is_finite()
            && self.distance_m.is_finite();
        if !ok {
            return domain(format!("invalid link budget {self:?}"));
        }
        Ok(())
    }

    /// Large-scale gain `L(d) = (lambda / (4 pi d0))^2 (d0 / d)^nu`.
    pub fn path_gain(&self) -> f64 {
        let near = self.wavelength_m / (self.reference_distance_m * 4.0 * PI);
        near * near * (self.reference_distance_m / self.distance_m).powf(self.path_loss_exponent)
    }

    /// Mean received power `P(d) = P_T L(d)` in mW.
    pub fn mean_received_power(&self) -> f64 {
        self.transmit_power_mw * self.path_gain()
    }
}

/// Nakagami-m fading: the power gain is Gamma(m, omega / m).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FadingChannel {
    pub nakagami_m: f64,
    pub omega: f64,
}

impl Default for FadingChannel {
    fn default() -> Self {
        Self { nakagami_m: DEFAULT_NAKAGAMI_M, omega: 1.0 }
    }
}

impl FadingChannel {
    pub fn new(nakagami_m: f64, omega: f64) -> Result<Self> {
        let c = Self { nakagami_m, omega };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nakagami_m >= 0.5 && self.nakagami_m.is_finite()) || !(self.omega > 0.0 && self.omega.is_finite()) {
            return domain(format!("invalid fading channel {self:?}"));
        }
        Ok(())
    }

    /// Density of the power gain. Returns `+inf` at `x = 0` when `m < 1`,
    /// where the density is singular.
    pub fn gamma_pdf(&self, x: f64) -> f64 {
        gamma_density(self.nakagami_m, self.omega / self.nakagami_m, x)
    }

    pub fn gamma_cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        reg_lower_unchecked(self.nakagami_m, self.nakagami_m * x / self.omega)
    }

    /// True where [`FadingChannel::gamma_pdf`] reports the singular value.
    pub fn is_singular_at(&self, x: f64) -> bool {
        x == 0.0 && self.nakagami_m < 1.0
    }

    pub fn sampler(&self) -> GammaSampler {
        GammaSampler::new(self.nakagami_m, self.omega / self.nakagami_m)
    }
}

fn gamma_density(shape: f64, scale: f64, x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    if x == 0.0 {
        return if shape < 1.0 {
            f64::INFINITY
        } else if shape == 1.0 {
            1.0 / scale
        } else {
            0.0
        };
    }
    let z = x / scale;
    if shape < 100.0 {
        z.powf(shape - 1.0) * (-z).exp() / (gamma_unchecked(shape) * scale)
    } else {
        ((shape - 1.0) * z.ln() - z - ln_gamma_unchecked(shape)).exp() / scale
    }
}

/// Nakagami parameter matching a Rician channel with factor `kappa`.
pub fn rician_to_nakagami(kappa: f64) -> Result<f64> {
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return domain(format!("Rician factor must be non-negative, got {kappa}"));
    }
    Ok((kappa + 1.0).powi(2) / (2.0 * kappa + 1.0))
}

/// Distribution of the received power `P_R = P(d) gamma`, which is
/// Gamma(m, P(d) omega / m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceivedPower {
    shape: f64,
    scale: f64,
    mean: f64,
}

impl ReceivedPower {
    pub fn new(link: &LinkBudget, ch: &FadingChannel) -> Result<Self> {
        link.validate()?;
        ch.validate()?;
        let mean = link.mean_received_power() * ch.omega;
        Ok(Self { shape: ch.nakagami_m, scale: mean / ch.nakagami_m, mean })
    }

    /// Gamma(shape, mean / shape) directly.
    pub fn from_mean(mean_mw: f64, shape: f64) -> Result<Self> {
        if !(mean_mw > 0.0) || !(shape > 0.0) {
            return domain("received power needs positive mean and shape");
        }
        Ok(Self { shape, scale: mean_mw / shape, mean: mean_mw })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    /// Scale `P(d) omega / m` of the gamma law, in mW.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.shape * self.scale * self.scale
    }

    pub fn pdf(&self, x: f64) -> f64 {
        gamma_density(self.shape, self.scale, x)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            reg_lower_unchecked(self.shape, x / self.scale)
        }
    }

    /// Survival function `1 - cdf(x)` without cancellation.
    pub fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            reg_upper_unchecked(self.shape, x / self.scale)
        }
    }

    /// Smallest `x` with `sf(x) <= tail`, found by bracketing and bisection.
    pub fn upper_quantile(&self, tail: f64) -> f64 {
        let mut hi = self.mean.max(self.scale);
        while self.sf(hi) > tail {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sf(mid) > tail {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    pub fn sampler(&self) -> GammaSampler {
        GammaSampler::new(self.shape, self.scale)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sampler().sample(rng)
    }
}

/// `n` IID draws of the received power, reproducible from `seed`.
pub fn sample_received_power(link: &LinkBudget, ch: &FadingChannel, n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return domain("sample count must be at least one");
    }
    let rp = ReceivedPower::new(link, ch)?;
    let sampler = rp.sampler();
    let mut out = Vec::with_capacity(n);
    crate::montecarlo::for_each_chunk(n as u64, seed, |_, len, rng| {
        let mut v = Vec::with_capacity(len as usize);
        for _ in 0..len {
            v.push(sampler.sample(rng));
        }
        v
    })
    .into_iter()
    .for_each(|v| out.extend(v));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_distance_gain() {
        let l = LinkBudget::new(1.0, 1.0).unwrap();
        let g = (0.3456 / (4.0 * PI)).powi(2);
        assert!((l.path_gain() - g).abs() < 1e-18);
        assert!((g - 7.563_585_830_427e-4).abs() < 1e-16);
    }

    #[test]
    fn inverse_square_scaling() {
        let l1 = LinkBudget::new(1.0, 1.0).unwrap().with_exponent(2.0).unwrap();
        let l10 = l1.at_distance(10.0).unwrap();
        assert!((l10.path_gain() - l1.path_gain() * 1e-2).abs() < 1e-18);
    }

    #[test]
    fn rician_conversion() {
        assert_eq!(rician_to_nakagami(0.0).unwrap(), 1.0);
        assert!((rician_to_nakagami(1.0).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!((rician_to_nakagami(10.0).unwrap() - 121.0 / 21.0).abs() < 1e-14);
        assert!(rician_to_nakagami(-1.0).is_err());
    }

    #[test]
    fn exponential_special_case() {
        let ch = FadingChannel::new(1.0, 1.0).unwrap();
        assert!((ch.gamma_pdf(2.0) - (-2.0f64).exp()).abs() < 1e-15);
        assert!((ch.gamma_cdf(2f64.ln()) - 0.5).abs() < 1e-15);
        assert_eq!(ch.gamma_cdf(0.0), 0.0);
    }

    #[test]
    fn singular_density_flag() {
        let ch = FadingChannel::new(0.5, 1.0).unwrap();
        assert!(ch.gamma_pdf(0.0).is_infinite());
        assert!(ch.is_singular_at(0.0));
        assert!(FadingChannel::new(0.4, 1.0).is_err());
    }

    #[test]
    fn invalid_links_rejected() {
        assert!(LinkBudget::new(0.0, 2.0).is_err());
        assert!(LinkBudget::new(1.0, 0.5).is_err());
    }
}
