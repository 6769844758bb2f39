use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EncoderStyle {
    /// Hardware-efficient angle encoding: one RY per qubit, optional CX ring.
    HE,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderSpec {
    pub style: EncoderStyle,
    /// Per-feature `(min, max)` mapped onto RY angles `[0, π]`.
    pub feature_range: Vec<(f64, f64)>,
    pub entangle: bool,
}

impl EncoderSpec {
    pub fn new(feature_range: Vec<(f64, f64)>, entangle: bool) -> Result<Self> {
        if let Some((lo, hi)) = feature_range.iter().find(|(lo, hi)| !(lo < hi)) {
            return Err(Error::Validation(format!(
                "feature_range requires min < max, got ({lo}, {hi})"
            )));
        }
        Ok(Self {
            style: EncoderStyle::HE,
            feature_range,
            entangle,
        })
    }

    /// Ranges taken from observed column extrema; a constant column gets a
    /// unit-width range starting at its value.
    pub fn fit(ranges: &[(f64, f64)], entangle: bool) -> Result<Self> {
        let widened = ranges
            .iter()
            .map(|&(lo, hi)| if hi > lo { (lo, hi) } else { (lo, lo + 1.0) })
            .collect();
        Self::new(widened, entangle)
    }

    pub fn angle(&self, feature: usize, value: f64) -> f64 {
        let (lo, hi) = self.feature_range[feature];
        (PI * (value - lo) / (hi - lo)).clamp(0.0, PI)
    }
}

pub fn encode(features: &[f64], spec: &EncoderSpec, n_qubits: usize) -> Result<Circuit> {
    if features.len() != n_qubits {
        return Err(Error::DimensionMismatch {
            expected: n_qubits,
            got: features.len(),
        });
    }
    if spec.feature_range.len() != n_qubits {
        return Err(Error::DimensionMismatch {
            expected: n_qubits,
            got: spec.feature_range.len(),
        });
    }
    let mut circuit = Circuit::new(n_qubits);
    for (q, &x) in features.iter().enumerate() {
        circuit.push(Gate::ry(q, spec.angle(q, x)))?;
    }
    if spec.entangle && n_qubits >= 2 {
        for q in 0..n_qubits {
            circuit.push(Gate::cx(q, (q + 1) % n_qubits))?;
        }
    }
    Ok(circuit)
}
