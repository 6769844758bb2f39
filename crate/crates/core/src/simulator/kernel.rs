//! Dense local-operator kernels shared by the state-vector and density-matrix
//! backends.
//!
//! Qubit `q` of an `n`-qubit register lives at bit `n - 1 - q` of the basis
//! index, so qubit 0 is the leftmost character of a printed bitstring.

use num_complex::Complex64;

use crate::circuit::{Gate, GateKind};

pub(crate) type C64 = Complex64;

const ZERO: C64 = Complex64::new(0.0, 0.0);
const ONE: C64 = Complex64::new(1.0, 0.0);

pub(crate) fn bit_position(n_qubits: usize, qubit: usize) -> usize {
    n_qubits - 1 - qubit
}

/// Row-major unitary of `gate` on its own targets, `targets[0]` most significant.
pub(crate) fn gate_matrix(gate: &Gate) -> Vec<C64> {
    let theta = gate.params.first().copied().unwrap_or(0.0);
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let i = Complex64::new(0.0, 1.0);
    match gate.kind {
        GateKind::H => {
            let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            vec![h, h, h, -h]
        }
        GateKind::X => vec![ZERO, ONE, ONE, ZERO],
        GateKind::RX => vec![c.into(), -i * s, -i * s, c.into()],
        GateKind::RY => vec![c.into(), (-s).into(), s.into(), c.into()],
        GateKind::RZ => vec![(-i * theta / 2.0).exp(), ZERO, ZERO, (i * theta / 2.0).exp()],
        GateKind::CX => {
            let mut m = vec![ZERO; 16];
            m[0] = ONE;
            m[5] = ONE;
            m[11] = ONE;
            m[14] = ONE;
            m
        }
        GateKind::ZZ => {
            let (a, b) = ((-i * theta / 2.0).exp(), (i * theta / 2.0).exp());
            let mut m = vec![ZERO; 16];
            m[0] = a;
            m[5] = b;
            m[10] = b;
            m[15] = a;
            m
        }
    }
}

/// Apply a `2^k × 2^k` row-major matrix to the bits at `positions` of `amps`.
/// `positions[0]` is the most significant bit of the local index.
pub(crate) fn apply_local(amps: &mut [C64], positions: &[usize], matrix: &[C64]) {
    let k = positions.len();
    let dim = 1usize << k;
    debug_assert_eq!(matrix.len(), dim * dim);
    let mask: usize = positions.iter().map(|&p| 1usize << p).sum();
    let offsets: Vec<usize> = (0..dim)
        .map(|local| {
            (0..k)
                .filter(|&j| (local >> (k - 1 - j)) & 1 == 1)
                .map(|j| 1usize << positions[j])
                .sum()
        })
        .collect();
    let mut input = vec![ZERO; dim];
    for base in 0..amps.len() {
        if base & mask != 0 {
            continue;
        }
        for (slot, &off) in input.iter_mut().zip(&offsets) {
            *slot = amps[base + off];
        }
        for (r, &off) in offsets.iter().enumerate() {
            let row = &matrix[r * dim..(r + 1) * dim];
            let mut acc = ZERO;
            for (m, x) in row.iter().zip(&input) {
                acc += m * x;
            }
            amps[base + off] = acc;
        }
    }
}
