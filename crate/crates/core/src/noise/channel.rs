use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const COMPLETENESS_TOL: f64 = 1e-10;
const PRUNE_TOL: f64 = 1e-15;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn mat2(entries: [[Complex64; 2]; 2]) -> CMatrix {
    CMatrix::from_fn(2, 2, |r, col| entries[r][col])
}

pub fn pauli(index: usize) -> CMatrix {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    match index {
        0 => mat2([[l, o], [o, l]]),
        1 => mat2([[o, l], [l, o]]),
        2 => mat2([[o, -i], [i, o]]),
        3 => mat2([[l, o], [o, -l]]),
        _ => panic!("pauli index {index} out of range"),
    }
}

/// A completely positive trace-preserving map `ρ → Σ K ρ K†` on a block of
/// `n_qubits` adjacent-in-order qubits.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    n_qubits: usize,
    operators: Vec<CMatrix>,
}

impl KrausChannel {
    /// Validates dimensions and `Σ K†K = I`.
    pub fn new(operators: Vec<CMatrix>) -> Result<Self> {
        let first = operators.first().ok_or(Error::EmptyInput)?;
        let dim = first.nrows();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::Validation(format!(
                "Kraus operator dimension {dim} is not a qubit dimension"
            )));
        }
        if operators.iter().any(|k| k.nrows() != dim || k.ncols() != dim) {
            return Err(Error::Validation("Kraus operators differ in shape".into()));
        }
        let channel = Self {
            n_qubits: dim.trailing_zeros() as usize,
            operators,
        };
        let defect = channel.completeness_defect();
        if defect > COMPLETENESS_TOL {
            return Err(Error::Validation(format!(
                "Kraus completeness violated by {defect:e}"
            )));
        }
        Ok(channel)
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            operators: vec![CMatrix::identity(1 << n_qubits, 1 << n_qubits)],
        }
    }

    /// `ρ → (1 − p) ρ + p I/d` written over the `4^k` Pauli strings.
    pub fn depolarizing(n_qubits: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Validation(format!(
                "depolarizing probability {p} not in [0, 1]"
            )));
        }
        if p == 0.0 {
            return Ok(Self::identity(n_qubits));
        }
        let n_paulis = 1usize << (2 * n_qubits);
        let weight_rest = p / n_paulis as f64;
        let weight_id = 1.0 - (n_paulis as f64 - 1.0) * weight_rest;
        let mut operators = Vec::with_capacity(n_paulis);
        for string in 0..n_paulis {
            let mut op = CMatrix::identity(1, 1);
            for slot in (0..n_qubits).rev() {
                op = op.kronecker(&pauli((string >> (2 * slot)) & 3));
            }
            let w = if string == 0 { weight_id } else { weight_rest };
            operators.push(op * c(w.sqrt(), 0.0));
        }
        Self::new(operators)
    }

    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::Validation(format!("damping {gamma} not in [0, 1]")));
        }
        let o = c(0.0, 0.0);
        Self::new(vec![
            mat2([[c(1.0, 0.0), o], [o, c((1.0 - gamma).sqrt(), 0.0)]]),
            mat2([[o, c(gamma.sqrt(), 0.0)], [o, o]]),
        ])
        .map(Self::pruned)
    }

    pub fn phase_damping(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Validation(format!("dephasing {lambda} not in [0, 1]")));
        }
        let o = c(0.0, 0.0);
        Self::new(vec![
            mat2([[c(1.0, 0.0), o], [o, c((1.0 - lambda).sqrt(), 0.0)]]),
            mat2([[o, o], [o, c(lambda.sqrt(), 0.0)]]),
        ])
        .map(Self::pruned)
    }

    /// Amplitude damping followed by the extra pure dephasing needed for the
    /// coherences to decay as `exp(-t/t2)`.
    pub fn thermal_relaxation(duration: f64, t1: f64, t2: f64) -> Result<Self> {
        let (gamma, lambda) = relaxation_parameters(duration, t1, t2);
        Self::amplitude_damping(gamma)?.compose(&Self::phase_damping(lambda)?)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    /// Largest entry of `Σ K†K − I`.
    pub fn completeness_defect(&self) -> f64 {
        let dim = self.dim();
        let mut acc = CMatrix::zeros(dim, dim);
        for k in &self.operators {
            acc += k.adjoint() * k;
        }
        acc -= CMatrix::identity(dim, dim);
        acc.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Apply `self` first, then `then`.
    pub fn compose(&self, then: &KrausChannel) -> Result<Self> {
        if self.n_qubits != then.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                got: then.n_qubits,
            });
        }
        let mut operators = Vec::with_capacity(self.operators.len() * then.operators.len());
        for b in &then.operators {
            for a in &self.operators {
                operators.push(b * a);
            }
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            operators,
        }
        .pruned())
    }

    /// Independent action on two qubit blocks; `self` acts on the leading block.
    pub fn tensor(&self, other: &KrausChannel) -> Self {
        let mut operators = Vec::with_capacity(self.operators.len() * other.operators.len());
        for a in &self.operators {
            for b in &other.operators {
                operators.push(a.kronecker(b));
            }
        }
        Self {
            n_qubits: self.n_qubits + other.n_qubits,
            operators,
        }
        .pruned()
    }

    fn pruned(mut self) -> Self {
        self.operators
            .retain(|k| k.iter().any(|z| z.norm() > PRUNE_TOL));
        if self.operators.is_empty() {
            return Self::identity(self.n_qubits);
        }
        self
    }

    /// `Σ K ⊗ K̄` in row-major order, acting on `vec(ρ)` with the row index
    /// as the high half.
    pub fn superoperator(&self) -> Vec<Complex64> {
        let dim = self.dim();
        let sdim = dim * dim;
        let mut s = vec![Complex64::new(0.0, 0.0); sdim * sdim];
        for k in &self.operators {
            for r in 0..dim {
                for rp in 0..dim {
                    let krr = k[(r, rp)];
                    if krr == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for col in 0..dim {
                        for cp in 0..dim {
                            let v = krr * k[(col, cp)].conj();
                            s[(r * dim + col) * sdim + rp * dim + cp] += v;
                        }
                    }
                }
            }
        }
        s
    }

    /// Reference application on a full matrix of matching dimension.
    pub fn apply_to(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(rho.nrows(), rho.ncols());
        for k in &self.operators {
            out += k * rho * k.adjoint();
        }
        out
    }
}

/// `(γ, λ)` for a relaxation window of `duration` with the given `t1`, `t2`.
///
/// Amplitude damping alone decays coherences by `exp(-t/2t1)`; the remaining
/// factor `exp(-t(1/t2 − 1/2t1))` comes from phase damping, clamped to zero
/// when `t2` is already saturated by `t1`.
pub fn relaxation_parameters(duration: f64, t1: f64, t2: f64) -> (f64, f64) {
    if duration <= 0.0 {
        return (0.0, 0.0);
    }
    let gamma = 1.0 - (-duration / t1).exp();
    let rate = (1.0 / t2 - 0.5 / t1).max(0.0);
    let lambda = 1.0 - (-2.0 * duration * rate).exp();
    (gamma, lambda)
}
