//! Power-splitting backscatter: the tag absorbs a share `tau_d` of the
//! incident power (a fraction `chi` of which is harvested) and reflects a
//! share `rho_u` back to the interrogator, which sees `rho_u P_R^2 / P_T`.
//! A round trip succeeds when the interrogator's BER is below `beta` and the
//! tag harvests more than its consumption `P_c`.

use crate::channel::{FadingChannel, LinkBudget, ReceivedPower};
use crate::error::{domain, Result};
use crate::harvester::{Harvester, InvertibleHarvester};
use crate::montecarlo::{simulate_rfid, RfidCounts, SimulationPlan};
use crate::special::{r_inverse_unchecked, r_unchecked};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RfidScenario {
    /// `tau_d`: share of incident power absorbed by the tag.
    pub absorb_fraction: f64,
    /// `chi`: share of the absorbed power routed to the harvester.
    pub harvest_split: f64,
    /// `rho_u`: share of incident power backscattered.
    pub backscatter_share: f64,
    /// `sigma_u^2` at the interrogator, in mW.
    pub noise_var_mw: f64,
    /// `beta`: BER threshold in (0, 0.5).
    pub ber_threshold: f64,
    /// `P_c`: tag power consumption in mW.
    pub consumption_mw: f64,
}

impl Default for RfidScenario {
    fn default() -> Self {
        Self {
            absorb_fraction: 0.5,
            harvest_split: 0.5,
            backscatter_share: 0.01,
            noise_var_mw: 1e-11,
            ber_threshold: 1e-5,
            consumption_mw: 1e-3,
        }
    }
}

impl RfidScenario {
    pub fn validate(&self) -> Result<()> {
        let open = |x: f64| x > 0.0 && x < 1.0;
        if !open(self.absorb_fraction) || !open(self.harvest_split) {
            return domain("absorb fraction and harvest split must lie in (0, 1)");
        }
        if !(self.backscatter_share > 0.0 && self.backscatter_share <= 1.0 - self.absorb_fraction) {
            return domain("backscatter share must lie in (0, 1 - absorb fraction]");
        }
        if !(self.noise_var_mw > 0.0) {
            return domain("noise variance must be positive");
        }
        if !(self.ber_threshold > 0.0 && self.ber_threshold < 0.5) {
            return domain("BER threshold must lie in (0, 0.5)");
        }
        if !(self.consumption_mw > 0.0) {
            return domain("tag consumption must be positive");
        }
        Ok(())
    }

    /// `zeta_har = chi tau_d`.
    pub fn harvest_share(&self) -> f64 {
        self.harvest_split * self.absorb_fraction
    }

    pub fn with_consumption(mut self, p_c: f64) -> Self {
        self.consumption_mw = p_c;
        self
    }

    /// Power received back at the interrogator, `rho_u p_r^2 / P_T`.
    pub fn interrogator_power(&self, link: &LinkBudget, p_r: f64) -> f64 {
        self.backscatter_share * p_r * p_r / link.transmit_power_mw
    }

    /// BER at the interrogator for received power `p_int`.
    pub fn ber(&self, p_int: f64) -> f64 {
        if p_int <= 0.0 {
            return 0.5;
        }
        r_unchecked((p_int / self.noise_var_mw).sqrt())
    }

    /// `theta_A`: the smallest tag input power meeting the BER threshold.
    pub fn ber_power_threshold(&self, link: &LinkBudget) -> f64 {
        link.transmit_power_mw.sqrt() * r_inverse_unchecked(self.ber_threshold) * self.noise_var_mw.sqrt()
            / self.backscatter_share.sqrt()
    }

    /// `theta_max = max(theta_A, p^{-1}(P_c) / zeta_har)`, or `None` when the
    /// consumption is out of the model's reach.
    pub fn critical_power<H: InvertibleHarvester + ?Sized>(&self, link: &LinkBudget, model: &H) -> Option<f64> {
        if self.consumption_mw >= model.plateau() {
            return None;
        }
        let need = model.inverse(self.consumption_mw)? / self.harvest_share();
        Some(self.ber_power_threshold(link).max(need))
    }
}

/// Closed-form probability that both the BER and energy events hold.
pub fn success_probability<H: InvertibleHarvester + ?Sized>(
    scn: &RfidScenario,
    link: &LinkBudget,
    ch: &FadingChannel,
    model: &H,
) -> Result<f64> {
    scn.validate()?;
    let rp = ReceivedPower::new(link, ch)?;
    Ok(match scn.critical_power(link, model) {
        None => 0.0,
        Some(theta) => rp.sf(theta),
    })
}

/// Monte Carlo estimate of the joint event for any harvester.
pub fn success_probability_mc<H: Harvester>(
    scn: &RfidScenario,
    link: &LinkBudget,
    ch: &FadingChannel,
    model: &H,
    samples: u64,
    seed: u64,
) -> Result<RfidCounts> {
    let rp = ReceivedPower::new(link, ch)?;
    let plan = SimulationPlan::new(rp, model, samples, 1, seed)?;
    Ok(simulate_rfid(&plan, scn, link, &[scn.consumption_mw])?[0])
}
