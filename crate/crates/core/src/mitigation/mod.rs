//! Error mitigation for extracted features: zero-noise extrapolation and a
//! learned corrector.

mod qlear;
mod zne;

pub use qlear::{
    default_corpus, qlear_correct, qlear_train, CircuitMeta, QlearModel, QlearParams, MIN_CORPUS,
};
pub use zne::{
    extrapolate, extrapolate_detailed, mitigate_values, zne_calibrate, zne_distribution, zne_error,
    zne_features, Extrapolated, Extrapolation, Folding, ZneConfig,
};
