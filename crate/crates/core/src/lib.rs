//! Statistics of sensitivity-limited, saturating RF energy harvesters under
//! Nakagami block fading.
//!
//! The crate models a harvester from measured (input, output) datapoints and
//! answers, in closed form where possible and by density evolution otherwise:
//!
//! * how often the input is below sensitivity ([`stats::sensitivity_outage`]),
//! * the distribution and mean of the harvested power ([`stats`]),
//! * how many coherence blocks it takes to charge a capacitor ([`density`]),
//! * how likely a power-splitting backscatter round trip succeeds ([`rfid`]).
//!
//! Every analytic result has a Monte Carlo counterpart in [`montecarlo`].

pub mod channel;
pub mod commands;
pub mod config;

pub mod density;
pub mod error;
pub mod harvester;
pub mod montecarlo;

pub mod quadrature;
pub mod rfid;
pub mod rng;
pub mod special;
pub mod stats;
pub mod validation;

pub use error::{Error, Result};
