//! Optical-cycle simulator for the NV⁻ center under arbitrary stress.
//!
//! The pipeline runs stress tensor → couplings → vibronic states and
//! spectral densities → ISC/radiative rates → rate-equation cycle, and the
//! modules below follow that order.

pub mod cli;
pub mod couplings;
pub mod cycle;
pub mod error;
pub mod frames;
pub mod pipeline;
pub mod presets;
pub mod rates;
pub mod spectral;
pub mod spinham;
pub mod units;
pub mod vibronic;

pub use error::{Error, Result};
