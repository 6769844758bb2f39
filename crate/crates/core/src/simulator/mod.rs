//! Ideal state-vector and noisy density-matrix execution.
//!
//! Both backends start in `|0…0⟩`. The noisy backend is exact density-matrix
//! evolution: after every gate unitary it applies the profile's channel for
//! that gate on the gate's qubits.

mod density;
mod kernel;
mod outcome;
mod state;

use std::collections::HashMap;

use num_complex::Complex64;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::noise::NoiseProfile;

pub use density::DensityMatrix;
pub use outcome::{
    bitstring, expectation_z, expectation_zz, measure_distribution, sample, Measurable,
    OutcomeDistribution, ShotCounts,
};
pub use state::StateVector;

pub const IDEAL_QUBIT_CAP: usize = 20;
pub const NOISY_QUBIT_CAP: usize = 12;

pub fn run_ideal(circuit: &Circuit) -> Result<StateVector> {
    run_ideal_capped(circuit, IDEAL_QUBIT_CAP)
}

pub fn run_ideal_capped(circuit: &Circuit, cap: usize) -> Result<StateVector> {
    if circuit.n_qubits() > cap {
        return Err(Error::CapExceeded {
            backend: "state-vector",
            n_qubits: circuit.n_qubits(),
            cap,
        });
    }
    let mut state = StateVector::zero_state(circuit.n_qubits());
    for gate in circuit.gates() {
        state.apply_gate(gate);
    }
    Ok(state)
}

pub fn run_noisy(circuit: &Circuit, profile: &NoiseProfile) -> Result<DensityMatrix> {
    run_noisy_capped(circuit, profile, NOISY_QUBIT_CAP)
}

pub fn run_noisy_capped(
    circuit: &Circuit,
    profile: &NoiseProfile,
    cap: usize,
) -> Result<DensityMatrix> {
    let n = circuit.n_qubits();
    if n > cap {
        return Err(Error::CapExceeded {
            backend: "density-matrix",
            n_qubits: n,
            cap,
        });
    }
    if profile.n_qubits() < n {
        return Err(Error::IncompatibleProfile {
            profile: profile.n_qubits(),
            circuit: n,
        });
    }
    // noise depends only on the qubits a gate touches
    let mut noise_cache: HashMap<Vec<usize>, Option<Vec<Complex64>>> = HashMap::new();
    let mut rho = DensityMatrix::zero_state(n);
    for gate in circuit.gates() {
        let noise = match noise_cache.get(&gate.targets) {
            Some(s) => s,
            None => {
                let channel = profile.channel_for_gate(gate)?;
                let trivial = channel.operators().len() == 1
                    && density::is_identity(&channel.operators()[0]);
                let entry = (!trivial).then(|| channel.superoperator());
                noise_cache.entry(gate.targets.clone()).or_insert(entry)
            }
        };
        match noise {
            None => rho.apply_gate(gate),
            Some(noise) => {
                let unitary = unitary_superoperator(&kernel::gate_matrix(gate), gate.arity());
                let combined = matmul(noise, &unitary, 1 << (2 * gate.arity()));
                rho.apply_superoperator(&gate.targets, &combined);
            }
        }
    }
    Ok(rho)
}

fn unitary_superoperator(u: &[Complex64], arity: usize) -> Vec<Complex64> {
    let d = 1usize << arity;
    let sd = d * d;
    let mut s = vec![Complex64::new(0.0, 0.0); sd * sd];
    for r in 0..d {
        for rp in 0..d {
            for c in 0..d {
                for cp in 0..d {
                    s[(r * d + c) * sd + rp * d + cp] = u[r * d + rp] * u[c * d + cp].conj();
                }
            }
        }
    }
    s
}

fn matmul(a: &[Complex64], b: &[Complex64], dim: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for k in 0..dim {
            let x = a[r * dim + k];
            if x == Complex64::new(0.0, 0.0) {
                continue;
            }
            for c in 0..dim {
                out[r * dim + c] += x * b[k * dim + c];
            }
        }
    }
    out
}

/// Ideal outcome distribution of `circuit`.
pub fn ideal_distribution(circuit: &Circuit) -> Result<OutcomeDistribution> {
    measure_distribution(&run_ideal(circuit)?, None)
}

/// Noisy outcome distribution of `circuit`, readout error included.
pub fn noisy_distribution(circuit: &Circuit, profile: &NoiseProfile) -> Result<OutcomeDistribution> {
    measure_distribution(&run_noisy(circuit, profile)?, Some(profile))
}
