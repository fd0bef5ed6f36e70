//! Link-level simulator for UAV connectivity through a 5G base station
//! assisted by a reconfigurable intelligent surface (RIS).
//!
//! The modules build on each other in this order: [`geometry`] gives link
//! distances and angles, [`arrays`] the steering vectors, [`channel`] the
//! rank-one LoS channels, [`los`] the blockage probabilities,
//! [`beamforming`] the RIS/precoder/combiner design and rates, [`linkrate`]
//! the average rate at one UAV position and [`experiments`] the CDF and
//! heatmap sweeps. [`cli`] drives everything from a config file.

pub mod arrays;
pub mod beamforming;
pub mod channel;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod linkrate;
pub mod los;

pub use error::{Error, Result};
