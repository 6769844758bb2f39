use num_complex::Complex64;

use crate::circuit::Gate;

use super::kernel::{apply_local, bit_position, gate_matrix};

/// Pure state of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero_state(n_qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self {
            n_qubits,
            amplitudes,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply_gate(&mut self, gate: &Gate) {
        let positions: Vec<usize> = gate
            .targets
            .iter()
            .map(|&q| bit_position(self.n_qubits, q))
            .collect();
        apply_local(&mut self.amplitudes, &positions, &gate_matrix(gate));
        debug_assert!((self.norm_sqr() - 1.0).abs() < 1e-9, "state norm drifted");
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}
