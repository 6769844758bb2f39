use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::circuit::Gate;
use crate::noise::KrausChannel;

use super::kernel::{apply_local, bit_position, gate_matrix};
use super::state::StateVector;

/// Mixed state of an `n`-qubit register, stored row-major as `vec(ρ)`.
///
/// In that layout, row qubit `q` sits at bit `n + (n-1-q)` and column qubit
/// `q` at bit `n-1-q`, so `UρU†` is `U` on the row bits and `Ū` on the column
/// bits, and a channel is its superoperator on both.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn zero_state(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
        entries[0] = Complex64::new(1.0, 0.0);
        Self { n_qubits, entries }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            entries[i * d + i] = Complex64::new(1.0 / d as f64, 0.0);
        }
        Self { n_qubits, entries }
    }

    pub fn from_pure(state: &StateVector) -> Self {
        let amps = state.amplitudes();
        let d = amps.len();
        let mut entries = Vec::with_capacity(d * d);
        for r in amps {
            for c in amps {
                entries.push(r * c.conj());
            }
        }
        Self {
            n_qubits: state.n_qubits(),
            entries,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        DMatrix::from_row_slice(d, d, &self.entries)
    }

    pub fn trace(&self) -> Complex64 {
        let d = self.dim();
        (0..d).map(|i| self.entries[i * d + i]).sum()
    }

    /// Largest `|ρ_ij − conj(ρ_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in r..d {
                worst = worst.max((self.entries[r * d + c] - self.entries[c * d + r].conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.to_matrix().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `½ ‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        assert_eq!(self.n_qubits, other.n_qubits, "register size mismatch");
        let diff = self.to_matrix() - other.to_matrix();
        0.5 * diff.symmetric_eigenvalues().iter().map(|e| e.abs()).sum::<f64>()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let d = self.dim();
        (0..d).map(|i| self.entries[i * d + i].re).collect()
    }

    fn row_bit(&self, q: usize) -> usize {
        self.n_qubits + bit_position(self.n_qubits, q)
    }

    fn col_bit(&self, q: usize) -> usize {
        bit_position(self.n_qubits, q)
    }

    pub fn apply_gate(&mut self, gate: &Gate) {
        let m = gate_matrix(gate);
        let rows: Vec<usize> = gate.targets.iter().map(|&q| self.row_bit(q)).collect();
        let cols: Vec<usize> = gate.targets.iter().map(|&q| self.col_bit(q)).collect();
        apply_local(&mut self.entries, &rows, &m);
        let conj: Vec<Complex64> = m.iter().map(|z| z.conj()).collect();
        apply_local(&mut self.entries, &cols, &conj);
        self.debug_check();
    }

    /// Apply a precomputed superoperator (see [`KrausChannel::superoperator`])
    /// acting on `qubits`.
    pub fn apply_superoperator(&mut self, qubits: &[usize], superop: &[Complex64]) {
        let mut positions: Vec<usize> = qubits.iter().map(|&q| self.row_bit(q)).collect();
        positions.extend(qubits.iter().map(|&q| self.col_bit(q)));
        apply_local(&mut self.entries, &positions, superop);
        self.debug_check();
    }

    /// Apply `channel` to `qubits` (`qubits[0]` is the channel's leading qubit).
    pub fn apply_channel(&mut self, channel: &KrausChannel, qubits: &[usize]) {
        assert_eq!(channel.n_qubits(), qubits.len(), "channel arity mismatch");
        if channel.operators().len() == 1 && is_identity(&channel.operators()[0]) {
            return;
        }
        self.apply_superoperator(qubits, &channel.superoperator());
    }

    fn debug_check(&self) {
        debug_assert!((self.trace().re - 1.0).abs() < 1e-9, "trace drifted");
        debug_assert!(self.trace().im.abs() < 1e-9, "trace drifted");
        debug_assert!(self.hermiticity_defect() < 1e-9, "lost hermiticity");
    }
}

pub(crate) fn is_identity(m: &DMatrix<Complex64>) -> bool {
    m.iter().enumerate().all(|(idx, z)| {
        let (r, c) = (idx % m.nrows(), idx / m.nrows());
        let expect = if r == c { 1.0 } else { 0.0 };
        (z.re - expect).abs() < 1e-15 && z.im.abs() < 1e-15
    })
}
