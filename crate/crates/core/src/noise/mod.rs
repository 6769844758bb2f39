//! Parametric device noise: depolarizing gate errors, thermal relaxation, and
//! readout confusion, realized as Kraus channels.

mod channel;
mod profile;

pub use channel::{pauli, relaxation_parameters, CMatrix, KrausChannel};
pub use profile::{Confusion, NoiseProfile};
