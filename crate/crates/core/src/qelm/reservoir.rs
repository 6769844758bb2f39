use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "style", rename_all = "snake_case")]
pub enum ReservoirStyle {
    /// `layers` rounds of one random RX/RY/RZ per qubit followed by a CX chain.
    Rotation { layers: usize },
    /// First-order Trotterized transverse-field Ising evolution with uniformly
    /// drawn couplings `J_ij` and fields `h_i`.
    Ising {
        j_range: (f64, f64),
        h_range: (f64, f64),
        time: f64,
        trotter_steps: usize,
    },
}

impl ReservoirStyle {
    pub fn ising() -> Self {
        Self::Ising {
            j_range: (-1.0, 1.0),
            h_range: (-1.0, 1.0),
            time: 1.0,
            trotter_steps: 3,
        }
    }

    pub fn rotation() -> Self {
        Self::Rotation { layers: 2 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Rotation { .. } => "Rotation",
            Self::Ising { .. } => "Ising",
        }
    }
}

/// A fixed random reservoir: every parameter is a pure function of `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReservoirSpec {
    pub n_qubits: usize,
    pub seed: u64,
    #[serde(flatten)]
    pub style: ReservoirStyle,
}

fn uniform(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

pub fn build_reservoir(spec: &ReservoirSpec) -> Circuit {
    let n = spec.n_qubits;
    let mut rng = rng_from_seed(spec.seed);
    let mut circuit = Circuit::new(n);
    let mut push = |g: Gate| circuit.push(g).expect("reservoir gates are in range");
    match &spec.style {
        ReservoirStyle::Rotation { layers } => {
            for _ in 0..*layers {
                for q in 0..n {
                    let theta = rng.random_range(0.0..TAU);
                    push(match rng.random_range(0..3) {
                        0 => Gate::rx(q, theta),
                        1 => Gate::ry(q, theta),
                        _ => Gate::rz(q, theta),
                    });
                }
                for q in 0..n.saturating_sub(1) {
                    push(Gate::cx(q, q + 1));
                }
            }
        }
        ReservoirStyle::Ising {
            j_range,
            h_range,
            time,
            trotter_steps,
        } => {
            let mut couplings = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    couplings.push((i, j, uniform(&mut rng, *j_range)));
                }
            }
            let fields: Vec<f64> = (0..n).map(|_| uniform(&mut rng, *h_range)).collect();
            let dt = time / *trotter_steps as f64;
            for _ in 0..*trotter_steps {
                for &(i, j, coupling) in &couplings {
                    push(Gate::zz(i, j, 2.0 * coupling * dt));
                }
                for (q, h) in fields.iter().enumerate() {
                    push(Gate::rx(q, 2.0 * h * dt));
                }
            }
        }
    }
    circuit
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;

    #[test]
    fn same_spec_same_circuit() {
        let spec = ReservoirSpec {
            n_qubits: 4,
            seed: 11,
            style: ReservoirStyle::ising(),
        };
        assert_eq!(build_reservoir(&spec), build_reservoir(&spec));
        let other = ReservoirSpec { seed: 12, ..spec.clone() };
        assert_ne!(build_reservoir(&spec), build_reservoir(&other));
    }

    #[test]
    fn ising_gate_count() {
        let spec = ReservoirSpec {
            n_qubits: 3,
            seed: 0,
            style: ReservoirStyle::Ising {
                j_range: (-1.0, 1.0),
                h_range: (-1.0, 1.0),
                time: 1.0,
                trotter_steps: 2,
            },
        };
        let c = build_reservoir(&spec);
        assert_eq!(c.len(), 12);
        assert_eq!(c.count_by_arity(), (6, 6));
        // the two Trotter steps repeat the same angles
        assert_eq!(c.gates()[..6], c.gates()[6..]);
    }

    #[test]
    fn rotation_layer_structure() {
        let spec = ReservoirSpec {
            n_qubits: 2,
            seed: 3,
            style: ReservoirStyle::Rotation { layers: 1 },
        };
        let c = build_reservoir(&spec);
        assert_eq!(c.len(), 3);
        assert!(matches!(c.gates()[0].kind, GateKind::RX | GateKind::RY | GateKind::RZ));
        assert_eq!(c.gates()[2], Gate::cx(0, 1));
    }

    #[test]
    fn serde_round_trip() {
        let spec = ReservoirSpec {
            n_qubits: 2,
            seed: 3,
            style: ReservoirStyle::rotation(),
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<ReservoirSpec>(&text).unwrap(), spec);
    }
}
