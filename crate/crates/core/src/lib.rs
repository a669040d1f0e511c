//! Simulation and statistics for Schumpeterian creative-destruction dynamics.
//!
//! - [`model`]: the Thurner product-network model with either the random-flip
//!   or the fitness-extinction innovation rule.
//! - [`bak_sneppen`]: a 1-D Bak-Sneppen reference model and a random-extinction
//!   control.
//! - [`analysis`]: plateau (waiting-time) extraction, histograms, exponential
//!   and power-law fits, and model comparison.

pub mod analysis;
pub mod bak_sneppen;
pub mod error;
pub mod model;
pub mod rng;

pub use error::ModelError;
