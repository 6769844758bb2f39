use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::simulator::{expectation_z, expectation_zz, sample, OutcomeDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    /// Full outcome distribution, length `2^n`.
    Probabilities,
    /// `⟨Z_q⟩` per qubit, length `n`.
    ZExpectations,
    /// `⟨Z_q⟩` then `⟨Z_i Z_j⟩` for `i < j`, length `n + n(n−1)/2`.
    ZAndZzExpectations,
}

impl FeatureKind {
    pub fn dim(self, n_qubits: usize) -> usize {
        match self {
            Self::Probabilities => 1 << n_qubits,
            Self::ZExpectations => n_qubits,
            Self::ZAndZzExpectations => n_qubits + n_qubits * (n_qubits - 1) / 2,
        }
    }

    pub fn is_probability(self) -> bool {
        self == Self::Probabilities
    }

    /// Features of an exact distribution.
    pub fn values(self, dist: &OutcomeDistribution) -> Result<Vec<f64>> {
        let n = dist.n_qubits();
        match self {
            Self::Probabilities => Ok(dist.probabilities().to_vec()),
            Self::ZExpectations => (0..n).map(|q| expectation_z(dist, q)).collect(),
            Self::ZAndZzExpectations => {
                let mut out = Self::ZExpectations.values(dist)?;
                for i in 0..n {
                    for j in i + 1..n {
                        out.push(expectation_zz(dist, i, j)?);
                    }
                }
                Ok(out)
            }
        }
    }

    /// Project mitigated values back to the valid range: probability vectors
    /// are clipped to `[0, 1]` and renormalized, expectations clipped to
    /// `[−1, 1]`.
    pub fn clip(self, values: &mut [f64]) {
        match self {
            Self::Probabilities => {
                values.iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0));
                let total: f64 = values.iter().sum();
                if total > 0.0 {
                    values.iter_mut().for_each(|v| *v /= total);
                } else {
                    let u = 1.0 / values.len() as f64;
                    values.iter_mut().for_each(|v| *v = u);
                }
            }
            Self::ZExpectations | Self::ZAndZzExpectations => {
                values.iter_mut().for_each(|v| *v = v.clamp(-1.0, 1.0));
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureMapSpec {
    pub kind: FeatureKind,
    /// Shots per circuit execution; `0` means exact probabilities.
    pub shots: u64,
}

impl FeatureMapSpec {
    pub fn exact(kind: FeatureKind) -> Self {
        Self { kind, shots: 0 }
    }

    pub fn dim(&self, n_qubits: usize) -> usize {
        self.kind.dim(n_qubits)
    }

    /// Features of one execution; with shots, computed from counts drawn
    /// with `seed`.
    pub fn features(&self, dist: &OutcomeDistribution, seed: u64) -> Result<Vec<f64>> {
        if self.shots == 0 {
            self.kind.values(dist)
        } else {
            self.kind.values(&sample(dist, self.shots, seed).to_distribution())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Circuit;
    use crate::simulator::ideal_distribution;

    #[test]
    fn dimensions() {
        assert_eq!(FeatureKind::Probabilities.dim(3), 8);
        assert_eq!(FeatureKind::ZExpectations.dim(3), 3);
        assert_eq!(FeatureKind::ZAndZzExpectations.dim(4), 10);
    }

    #[test]
    fn bell_features() {
        let d = ideal_distribution(&Circuit::bell()).unwrap();
        let p = FeatureKind::Probabilities.values(&d).unwrap();
        for (got, want) in p.iter().zip([0.5, 0.0, 0.0, 0.5]) {
            assert!((got - want).abs() < 1e-12);
        }
        let z = FeatureKind::ZAndZzExpectations.values(&d).unwrap();
        assert!(z[0].abs() < 1e-12 && z[1].abs() < 1e-12);
        assert!((z[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shot_features_are_seeded_frequencies() {
        let d = ideal_distribution(&Circuit::bell()).unwrap();
        let spec = FeatureMapSpec {
            kind: FeatureKind::Probabilities,
            shots: 1000,
        };
        let a = spec.features(&d, 4).unwrap();
        assert_eq!(a, spec.features(&d, 4).unwrap());
        assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(a.iter().all(|v| (v * 1000.0).fract() < 1e-9 || (v * 1000.0).fract() > 1.0 - 1e-9));
    }

    #[test]
    fn clipping_rules() {
        let mut p = vec![1.03, -0.02, 0.0, 0.0];
        FeatureKind::Probabilities.clip(&mut p);
        assert_eq!(p, vec![1.0, 0.0, 0.0, 0.0]);
        let mut z = vec![1.2, -3.0, 0.4];
        FeatureKind::ZExpectations.clip(&mut z);
        assert_eq!(z, vec![1.0, -1.0, 0.4]);
    }
}
