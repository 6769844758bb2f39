//! Gate-list circuits and the structural transforms used by zero-noise
//! extrapolation (adjoint, global folding, fractional folding).
//!
//! Circuits are values: every transform returns a new circuit and leaves its
//! input untouched.
//!
//! # Text form
//!
//! One item per line, `#` starts a comment, blank lines are ignored:
//!
//! ```text
//! qubits 2
//! H 0
//! CX 0 1
//! RX 1 0.25
//! ZZ 0 1 -1.5
//! ```
//!
//! The header `qubits N` must come first. Each gate line is the gate mnemonic,
//! its target indices, then its angles in radians.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    X,
    CX,
    RX,
    RY,
    RZ,
    /// `exp(-i θ/2 Z⊗Z)`.
    ZZ,
}

impl GateKind {
    pub fn n_targets(self) -> usize {
        match self {
            GateKind::CX | GateKind::ZZ => 2,
            _ => 1,
        }
    }

    pub fn n_params(self) -> usize {
        match self {
            GateKind::H | GateKind::X | GateKind::CX => 0,
            _ => 1,
        }
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::CX => "CX",
            GateKind::RX => "RX",
            GateKind::RY => "RY",
            GateKind::RZ => "RZ",
            GateKind::ZZ => "ZZ",
        }
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "H" => GateKind::H,
            "X" => GateKind::X,
            "CX" | "CNOT" => GateKind::CX,
            "RX" => GateKind::RX,
            "RY" => GateKind::RY,
            "RZ" => GateKind::RZ,
            "ZZ" | "RZZ" => GateKind::ZZ,
            other => return Err(Error::Parse(format!("unknown gate `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub params: Vec<f64>,
}

impl Gate {
    /// Checked constructor; only arity is validated here; register bounds are
    /// checked when the gate joins a circuit.
    pub fn new(kind: GateKind, targets: Vec<usize>, params: Vec<f64>) -> Result<Self> {
        if targets.len() != kind.n_targets() {
            return Err(Error::ArityMismatch {
                kind: kind.mnemonic().into(),
                expected: format!("{} target(s)", kind.n_targets()),
                got: format!("{} target(s)", targets.len()),
            });
        }
        if params.len() != kind.n_params() {
            return Err(Error::ArityMismatch {
                kind: kind.mnemonic().into(),
                expected: format!("{} angle(s)", kind.n_params()),
                got: format!("{} angle(s)", params.len()),
            });
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(Error::ArityMismatch {
                kind: kind.mnemonic().into(),
                expected: "distinct targets".into(),
                got: format!("{:?}", targets),
            });
        }
        Ok(Self {
            kind,
            targets,
            params,
        })
    }

    pub fn h(q: usize) -> Self {
        Self::new(GateKind::H, vec![q], vec![]).unwrap()
    }

    pub fn x(q: usize) -> Self {
        Self::new(GateKind::X, vec![q], vec![]).unwrap()
    }

    /// Panics if `control == target`.
    pub fn cx(control: usize, target: usize) -> Self {
        Self::new(GateKind::CX, vec![control, target], vec![]).expect("distinct CX qubits")
    }

    pub fn rx(q: usize, theta: f64) -> Self {
        Self::new(GateKind::RX, vec![q], vec![theta]).unwrap()
    }

    pub fn ry(q: usize, theta: f64) -> Self {
        Self::new(GateKind::RY, vec![q], vec![theta]).unwrap()
    }

    pub fn rz(q: usize, theta: f64) -> Self {
        Self::new(GateKind::RZ, vec![q], vec![theta]).unwrap()
    }

    /// Panics if `a == b`.
    pub fn zz(a: usize, b: usize, theta: f64) -> Self {
        Self::new(GateKind::ZZ, vec![a, b], vec![theta]).expect("distinct ZZ qubits")
    }

    pub fn adjoint(&self) -> Self {
        match self.kind {
            GateKind::H | GateKind::X | GateKind::CX => self.clone(),
            _ => Self {
                kind: self.kind,
                targets: self.targets.clone(),
                params: self.params.iter().map(|a| -a).collect(),
            },
        }
    }

    pub fn arity(&self) -> usize {
        self.targets.len()
    }

    fn check_bounds(&self, n_qubits: usize) -> Result<()> {
        match self.targets.iter().find(|&&q| q >= n_qubits) {
            Some(&index) => Err(Error::InvalidTarget { index, n_qubits }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.mnemonic())?;
        for t in &self.targets {
            write!(f, " {t}")?;
        }
        for p in &self.params {
            write!(f, " {p:?}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    /// Panics if `n_qubits == 0`.
    pub fn new(n_qubits: usize) -> Self {
        assert!(n_qubits > 0, "a circuit needs at least one qubit");
        Self {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(n_qubits: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        let mut circuit = Self::new(n_qubits);
        for gate in gates {
            circuit.push(gate)?;
        }
        Ok(circuit)
    }

    /// The two-qubit entangling circuit `H(0); CX(0, 1)`.
    pub fn bell() -> Self {
        Self::from_gates(2, [Gate::h(0), Gate::cx(0, 1)]).unwrap()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// In-place append used by builders that own their circuit.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.check_bounds(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Returns a copy with `gate` appended; `self` is unchanged.
    pub fn append_gate(&self, gate: Gate) -> Result<Self> {
        let mut out = self.clone();
        out.push(gate)?;
        Ok(out)
    }

    /// `self` followed by `other`. Both must act on the same register size.
    pub fn compose(&self, other: &Circuit) -> Result<Self> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                got: other.n_qubits,
            });
        }
        let mut out = self.clone();
        out.gates.extend(other.gates.iter().cloned());
        Ok(out)
    }

    pub fn inverse(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
        }
    }

    /// `C (C† C)^k`.
    pub fn global_fold(&self, k: usize) -> Self {
        let inv = self.inverse();
        let mut gates = Vec::with_capacity(self.gates.len() * (2 * k + 1));
        gates.extend(self.gates.iter().cloned());
        for _ in 0..k {
            gates.extend(inv.gates.iter().cloned());
            gates.extend(self.gates.iter().cloned());
        }
        Self {
            n_qubits: self.n_qubits,
            gates,
        }
    }

    /// Fold to an arbitrary noise scale factor.
    ///
    /// Globally folds to the largest odd integer `s_odd <= scale`, then folds
    /// the trailing `m = round((scale - s_odd) * len / 2)` gates once more
    /// (`T† T` appended after the folded circuit).
    pub fn fold_to_scale(&self, scale: f64) -> Result<Self> {
        if !(scale >= 1.0) || !scale.is_finite() {
            return Err(Error::ScaleOutOfRange(scale));
        }
        let mut s_odd = scale.floor() as usize;
        if s_odd % 2 == 0 {
            s_odd -= 1;
        }
        let mut out = self.global_fold((s_odd - 1) / 2);
        let n = self.gates.len();
        let m = (((scale - s_odd as f64) * n as f64) / 2.0).round() as usize;
        let m = m.min(n);
        if m > 0 {
            let tail = &self.gates[n - m..];
            out.gates.extend(tail.iter().rev().map(Gate::adjoint));
            out.gates.extend(tail.iter().cloned());
        }
        Ok(out)
    }

    pub fn count_by_arity(&self) -> (usize, usize) {
        let two = self.gates.iter().filter(|g| g.arity() == 2).count();
        (self.gates.len() - two, two)
    }

    /// Number of layers when each gate is scheduled as early as its qubits allow.
    pub fn depth(&self) -> usize {
        let mut frontier = vec![0usize; self.n_qubits];
        for gate in &self.gates {
            let layer = gate.targets.iter().map(|&q| frontier[q]).max().unwrap_or(0) + 1;
            for &q in &gate.targets {
                frontier[q] = layer;
            }
        }
        frontier.into_iter().max().unwrap_or(0)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.n_qubits)?;
        for gate in &self.gates {
            writeln!(f, "{gate}")?;
        }
        Ok(())
    }
}

impl FromStr for Circuit {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut circuit: Option<Circuit> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse(format!("line {}: {msg}", lineno + 1));
            let mut tokens = line.split_whitespace();
            let head = tokens.next().unwrap();
            match circuit.as_mut() {
                None => {
                    if !head.eq_ignore_ascii_case("qubits") {
                        return Err(err("expected `qubits N` header".into()));
                    }
                    let n: usize = tokens
                        .next()
                        .and_then(|t| t.parse().ok())
                        .filter(|&n| n > 0)
                        .ok_or_else(|| err("bad qubit count".into()))?;
                    circuit = Some(Circuit::new(n));
                }
                Some(c) => {
                    let kind: GateKind = head.parse().map_err(|e: Error| err(e.to_string()))?;
                    let rest: Vec<&str> = tokens.collect();
                    let nt = kind.n_targets().min(rest.len());
                    let targets = rest[..nt]
                        .iter()
                        .map(|t| t.parse::<usize>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|e| err(format!("bad target: {e}")))?;
                    let params = rest[nt..]
                        .iter()
                        .map(|t| t.parse::<f64>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|e| err(format!("bad angle: {e}")))?;
                    let gate = Gate::new(kind, targets, params)?;
                    c.push(gate)?;
                }
            }
        }
        circuit.ok_or_else(|| Error::Parse("missing `qubits N` header".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn append_on_empty_circuit() {
        let c = Circuit::new(2);
        let c2 = c.append_gate(Gate::h(0)).unwrap();
        assert_eq!(c.len(), 0);
        assert_eq!(c2.len(), 1);
    }

    #[test]
    fn bell_is_two_gates() {
        let c = Circuit::new(2)
            .append_gate(Gate::h(0))
            .unwrap()
            .append_gate(Gate::cx(0, 1))
            .unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c, Circuit::bell());
    }

    #[test]
    fn out_of_range_target_rejected() {
        let err = Circuit::new(2).append_gate(Gate::cx(0, 5)).unwrap_err();
        assert!(matches!(err, Error::InvalidTarget { index: 5, n_qubits: 2 }));
    }

    #[test]
    fn arity_checked() {
        assert!(matches!(
            Gate::new(GateKind::RX, vec![0], vec![]),
            Err(Error::ArityMismatch { .. })
        ));
        assert!(matches!(
            Gate::new(GateKind::CX, vec![0], vec![]),
            Err(Error::ArityMismatch { .. })
        ));
        assert!(matches!(
            Gate::new(GateKind::H, vec![0], vec![0.1]),
            Err(Error::ArityMismatch { .. })
        ));
        assert!(Gate::new(GateKind::ZZ, vec![1, 1], vec![0.1]).is_err());
    }

    #[test]
    fn inverse_examples() {
        let c = Circuit::from_gates(1, [Gate::h(0)]).unwrap();
        assert_eq!(c.inverse(), c);

        let c = Circuit::from_gates(2, [Gate::rx(0, 0.3), Gate::cx(0, 1)]).unwrap();
        let expected = Circuit::from_gates(2, [Gate::cx(0, 1), Gate::rx(0, -0.3)]).unwrap();
        assert_eq!(c.inverse(), expected);
        assert_eq!(c.inverse().inverse(), c);
    }

    #[test]
    fn global_fold_counts() {
        let bell = Circuit::bell();
        assert_eq!(bell.global_fold(0), bell);
        assert_eq!(bell.global_fold(1).len(), 6);
        assert_eq!(bell.global_fold(2).len(), 10);
    }

    #[test]
    fn fold_to_scale_counts() {
        let c = Circuit::from_gates(
            2,
            [Gate::h(0), Gate::cx(0, 1), Gate::rz(1, 0.2), Gate::ry(0, 1.1)],
        )
        .unwrap();
        assert_eq!(c.fold_to_scale(1.0).unwrap(), c);
        assert_eq!(c.fold_to_scale(3.0).unwrap().len(), 12);
        assert_eq!(c.fold_to_scale(5.0).unwrap().len(), 20);
        let two = c.fold_to_scale(2.0).unwrap();
        assert_eq!(two.len(), 8);
        // trailing two gates folded: ... RZ RY | RY† RZ† RZ RY
        assert_eq!(two.gates()[4], Gate::ry(0, -1.1));
        assert_eq!(two.gates()[5], Gate::rz(1, -0.2));
        assert!(matches!(
            c.fold_to_scale(0.5),
            Err(Error::ScaleOutOfRange(_))
        ));
    }

    #[test]
    fn text_roundtrip() {
        let c = Circuit::from_gates(
            3,
            [
                Gate::h(0),
                Gate::cx(0, 2),
                Gate::rx(1, 0.1 + 0.2),
                Gate::zz(1, 2, -std::f64::consts::PI),
            ],
        )
        .unwrap();
        let text = c.to_string();
        let back: Circuit = text.parse().unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn text_parse_errors() {
        assert!("H 0".parse::<Circuit>().is_err());
        assert!("qubits 2\nFOO 0".parse::<Circuit>().is_err());
        assert!("qubits 2\nCX 0 3".parse::<Circuit>().is_err());
        assert!("qubits 2\nRX 0".parse::<Circuit>().is_err());
        let c: Circuit = "# bell\nqubits 2\n\nH 0 # superpose\ncx 0 1\n".parse().unwrap();
        assert_eq!(c, Circuit::bell());
    }

    #[test]
    fn depth_and_counts() {
        let c = Circuit::from_gates(
            3,
            [Gate::h(0), Gate::h(1), Gate::cx(0, 1), Gate::x(2), Gate::zz(1, 2, 0.3)],
        )
        .unwrap();
        assert_eq!(c.depth(), 3);
        assert_eq!(c.count_by_arity(), (3, 2));
    }
}
