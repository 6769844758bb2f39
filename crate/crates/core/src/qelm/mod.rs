//! Quantum extreme learning machines.
//!
//! A model is a fixed front end (angle encoder, seeded random reservoir,
//! measurement feature map) followed by a trained classical readout. Only
//! the readout ever learns; the reservoir is a pure function of its seed.

mod backend;
mod encoder;
mod features;
mod front;
mod model;
mod reservoir;

pub use backend::{ExecutionBackend, Mitigator};
pub use encoder::{encode, EncoderSpec, EncoderStyle};
pub use features::{FeatureKind, FeatureMapSpec};
pub use front::{FeatureCache, QelmFront};
pub use model::{
    fit_readout, train, Prediction, QelmConfig, QelmModel, Readout, ReadoutHyper, ReadoutKind,
};
pub use reservoir::{build_reservoir, ReservoirSpec, ReservoirStyle};
