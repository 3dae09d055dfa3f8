//! Versioned JSON scenario configuration for the command line.
//!
//! Every field has a default, so `{}` is a valid document. Unknown fields
//! are rejected outside the `charging` and `rfid` sections. Loading
//! revalidates every parameter.

use crate::channel::{FadingChannel, LinkBudget, DEFAULT_PATH_LOSS_EXPONENT, DEFAULT_WAVELENGTH_M};
use crate::density::{ChargingSpec, DEFAULT_FFT_SIZE, DEFAULT_INTERVALS};
use crate::error::{Error, Result};
use crate::harvester::{Dataset, Spacing};
use crate::rfid::RfidScenario;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepScale {
    Linear,
    Log,
}

/// `count` points from `start` to `stop`, evenly spaced on a linear or
/// logarithmic axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub scale: SweepScale,
}

impl Sweep {
    pub fn single(x: f64) -> Self {
        Self { start: x, stop: x, count: 1, scale: SweepScale::Linear }
    }

    pub fn linear(start: f64, stop: f64, count: usize) -> Self {
        Self { start, stop, count, scale: SweepScale::Linear }
    }

    pub fn log(start: f64, stop: f64, count: usize) -> Self {
        Self { start, stop, count, scale: SweepScale::Log }
    }

    pub fn validate(&self, what: &str) -> Result<()> {
        if self.count == 0 || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::Config(format!("{what} sweep needs finite limits and count >= 1")));
        }
        if self.scale == SweepScale::Log && !(self.start > 0.0 && self.stop > 0.0) {
            return Err(Error::Config(format!("{what} log sweep needs positive limits")));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let n = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let t = i as f64 / n;
                match self.scale {
                    SweepScale::Linear => self.start + (self.stop - self.start) * t,
                    SweepScale::Log => (self.start.ln() + (self.stop.ln() - self.start.ln()) * t).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkConfig {
    pub transmit_power_mw: f64,
    pub distance_m: f64,
    pub path_loss_exponent: f64,
    pub wavelength_m: f64,
    pub reference_distance_m: f64,
    pub distance_sweep_m: Option<Sweep>,
    pub transmit_power_sweep_dbm: Option<Sweep>,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self {
            transmit_power_mw: 1500.0,
            distance_m: 5.0,
            path_loss_exponent: DEFAULT_PATH_LOSS_EXPONENT,
            wavelength_m: DEFAULT_WAVELENGTH_M,
            reference_distance_m: 1.0,
            distance_sweep_m: None,
            transmit_power_sweep_dbm: None,
        }
    }
}

impl LinkConfig {
    pub fn budget(&self) -> LinkBudget {
        LinkBudget {
            transmit_power_mw: self.transmit_power_mw,
            distance_m: self.distance_m,
            path_loss_exponent: self.path_loss_exponent,
            wavelength_m: self.wavelength_m,
            reference_distance_m: self.reference_distance_m,
        }
    }
}

/// Baseline efficiencies; a missing value is chosen by grid search against
/// the ground-truth expected power at the first sweep point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EtaConfig {
    pub linear: Option<f64>,
    pub constant_linear: Option<f64>,
    pub constant_linear_constant: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarvesterConfig {
    /// Bundled dataset, used when `curve_csv` is absent.
    pub dataset: Dataset,
    /// Path to a measured curve (see [`crate::harvester::HarvesterCurve::parse_csv`]).
    pub curve_csv: Option<String>,
    /// Degree of the efficiency polynomial; the dataset default when absent.
    pub fit_degree: Option<usize>,
    /// Number of piecewise-linear segments `M`.
    pub segments: usize,
    pub spacing: Spacing,
    pub eta: EtaConfig,
    /// Sensitivity values (dBm) swept by the outage command.
    pub sensitivity_sweep_dbm: Option<Sweep>,
}

impl Default for HarvesterConfig {
    fn default() -> Self {
        Self {
            dataset: Dataset::RectennaA,
            curve_csv: None,
            fit_degree: None,
            segments: 585,
            spacing: Spacing::UniformDb,
            eta: EtaConfig::default(),
            sensitivity_sweep_dbm: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChargingConfig {
    #[serde(flatten)]
    pub spec: ChargingSpec,
    /// Write the single-block density and first-passage PMF here.
    pub density_dump: Option<String>,
}

impl Default for ChargingConfig {
    fn default() -> Self {
        Self { spec: ChargingSpec::default(), density_dump: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RfidConfig {
    #[serde(flatten)]
    pub scenario: RfidScenario,
    pub consumption_sweep_mw: Option<Sweep>,
}

impl Default for RfidConfig {
    fn default() -> Self {
        Self { scenario: RfidScenario::default(), consumption_sweep_mw: Some(Sweep::log(1e-4, 1e-1, 13)) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericsConfig {
    pub grid_intervals: usize,
    pub fft_size: usize,
    pub quadrature_tolerance: f64,
    /// Stop extending the first-passage PMF once `P(N* > n)` drops below this.
    pub passage_tolerance: f64,
    pub max_blocks: usize,
    pub mc_trials: u64,
    pub seed: u64,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            grid_intervals: DEFAULT_INTERVALS,
            fft_size: DEFAULT_FFT_SIZE,
            quadrature_tolerance: 1e-10,
            passage_tolerance: 1e-7,
            max_blocks: 100_000,
            mc_trials: 100_000,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub link: LinkConfig,
    pub channel: FadingChannel,
    pub harvester: HarvesterConfig,
    pub charging: ChargingConfig,
    pub rfid: RfidConfig,
    pub numerics: NumericsConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            link: LinkConfig::default(),
            channel: FadingChannel::default(),
            harvester: HarvesterConfig::default(),
            charging: ChargingConfig::default(),
            rfid: RfidConfig::default(),
            numerics: NumericsConfig::default(),
        }
    }
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Domain(m) => Error::Config(m),
        other => other,
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        self.link.budget().validate().map_err(config_err)?;
        self.channel.validate().map_err(config_err)?;
        self.charging.spec.validate().map_err(config_err)?;
        self.rfid.scenario.validate().map_err(config_err)?;
        for (s, what) in [
            (&self.link.distance_sweep_m, "distance"),
            (&self.link.transmit_power_sweep_dbm, "transmit power"),
            (&self.harvester.sensitivity_sweep_dbm, "sensitivity"),
            (&self.rfid.consumption_sweep_mw, "consumption"),
        ] {
            if let Some(s) = s {
                s.validate(what)?;
            }
        }
        if let Some(s) = &self.link.distance_sweep_m {
            if s.start.min(s.stop) <= 0.0 {
                return Err(Error::Config("distances must be positive".into()));
            }
        }
        if let Some(s) = &self.rfid.consumption_sweep_mw {
            if s.start.min(s.stop) <= 0.0 {
                return Err(Error::Config("consumptions must be positive".into()));
            }
        }
        let h = &self.harvester;
        if h.segments == 0 {
            return Err(Error::Config("at least one segment is required".into()));
        }
        for eta in [h.eta.linear, h.eta.constant_linear, h.eta.constant_linear_constant].into_iter().flatten() {
            if !(0.0..1.0).contains(&eta) {
                return Err(Error::Config(format!("efficiency {eta} outside [0, 1)")));
            }
        }
        let n = &self.numerics;
        if n.grid_intervals < 2 || !n.fft_size.is_power_of_two() || n.fft_size <= n.grid_intervals + 1 {
            return Err(Error::Config("FFT size must be a power of two above the grid node count".into()));
        }
        if !(n.quadrature_tolerance > 0.0 && n.quadrature_tolerance < 1.0) || !(n.passage_tolerance > 0.0 && n.passage_tolerance < 1.0) {
            return Err(Error::Config("tolerances must lie in (0, 1)".into()));
        }
        if n.mc_trials == 0 || n.max_blocks == 0 {
            return Err(Error::Config("Monte Carlo trials and block cap must be positive".into()));
        }
        Ok(())
    }

    /// Distances of the sweep, or the single configured distance.
    pub fn distances(&self) -> Vec<f64> {
        self.link.distance_sweep_m.map_or_else(|| vec![self.link.distance_m], |s| s.values())
    }

    /// Transmit powers in mW.
    pub fn transmit_powers_mw(&self) -> Vec<f64> {
        self.link
            .transmit_power_sweep_dbm
            .map_or_else(|| vec![self.link.transmit_power_mw], |s| s.values().into_iter().map(crate::channel::dbm_to_mw).collect())
    }

    pub fn consumptions_mw(&self) -> Vec<f64> {
        self.rfid.consumption_sweep_mw.map_or_else(|| vec![self.rfid.scenario.consumption_mw], |s| s.values())
    }
}
