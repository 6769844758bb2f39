//! Quantum extreme learning machines under noise.
//!
//! A small laboratory that builds QELM models (encoder circuit, fixed random
//! reservoir, measurement features, trained readout) on a built-in simulator,
//! injects parametric device noise, applies error mitigation, and measures
//! accuracy degradation and predictive uncertainty.

pub mod circuit;
pub mod dataset;
pub mod error;
pub mod harness;
pub mod mitigation;
pub mod ml;
pub mod noise;
pub mod plot;
pub mod qelm;
pub mod rng;
pub mod simulator;
pub mod uq;

pub use error::{Error, Result};
