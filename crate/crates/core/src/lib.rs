//! Monte Carlo simulation of downlink/uplink decoupled (DUDe) cell association
//! in a three-tier heterogeneous network: UHF macro cells overlaid with mmWave
//! and UHF small cells, all deployed as independent Poisson point processes.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: point-process sampling, toroidal distances, building footprints
//! - [`blockage`]: blockage rate from building statistics and LoS draws
//! - [`channel`]: path loss, shadowing, Ricean fading, thermal noise
//! - [`association`]: biased max-received-power association in DL and UL
//! - [`linklayer`]: received power, interference, SINR, rate and coverage
//! - [`runner`]: trials, aggregation, sweeps, configuration and CSV output

pub mod association;
pub mod blockage;
pub mod channel;
pub mod error;
pub mod geometry;
pub mod linklayer;
pub mod runner;

pub use error::{Error, Result};
