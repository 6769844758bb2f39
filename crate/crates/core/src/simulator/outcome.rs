use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::NoiseProfile;
use crate::rng::rng_from_seed;

use super::density::DensityMatrix;
use super::kernel::bit_position;
use super::state::StateVector;

/// Computational-basis outcome probabilities, indexed by basis state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    n_qubits: usize,
    probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    /// Clamps round-off negatives to zero and renormalizes.
    pub fn new(n_qubits: usize, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_qubits,
                got: probabilities.len(),
            });
        }
        if probabilities.iter().any(|p| !p.is_finite() || *p < -1e-9) {
            return Err(Error::Validation("probabilities must be finite and non-negative".into()));
        }
        let mut probabilities: Vec<f64> = probabilities.into_iter().map(|p| p.max(0.0)).collect();
        let total: f64 = probabilities.iter().sum();
        if total <= 0.0 {
            return Err(Error::Validation("probabilities sum to zero".into()));
        }
        probabilities.iter_mut().for_each(|p| *p /= total);
        Ok(Self {
            n_qubits,
            probabilities,
        })
    }

    pub fn uniform(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        Self {
            n_qubits,
            probabilities: vec![1.0 / d as f64; d],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, bitstring: &str) -> f64 {
        usize::from_str_radix(bitstring, 2)
            .ok()
            .and_then(|i| self.probabilities.get(i).copied())
            .unwrap_or(0.0)
    }

    /// Bitstring-keyed view, dropping entries at or below `threshold`.
    pub fn to_map(&self, threshold: f64) -> BTreeMap<String, f64> {
        self.probabilities
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > threshold)
            .map(|(i, &p)| (bitstring(i, self.n_qubits), p))
            .collect()
    }

    /// Push each qubit's marginal through its confusion matrix.
    pub fn with_readout(&self, profile: &NoiseProfile) -> Result<Self> {
        if profile.n_qubits() < self.n_qubits {
            return Err(Error::IncompatibleProfile {
                profile: profile.n_qubits(),
                circuit: self.n_qubits,
            });
        }
        let mut p = self.probabilities.clone();
        for q in 0..self.n_qubits {
            let m = profile.readout[q];
            if m == [[1.0, 0.0], [0.0, 1.0]] {
                continue;
            }
            let bit = 1usize << bit_position(self.n_qubits, q);
            for i in 0..p.len() {
                if i & bit != 0 {
                    continue;
                }
                let (p0, p1) = (p[i], p[i | bit]);
                p[i] = p0 * m[0][0] + p1 * m[1][0];
                p[i | bit] = p0 * m[0][1] + p1 * m[1][1];
            }
        }
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= total);
        Ok(Self {
            n_qubits: self.n_qubits,
            probabilities: p,
        })
    }

    /// Total-variation distance.
    pub fn tv_distance(&self, other: &OutcomeDistribution) -> f64 {
        0.5 * self
            .probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }
}

pub fn bitstring(index: usize, n_qubits: usize) -> String {
    format!("{index:0width$b}", width = n_qubits)
}

/// Anything that yields computational-basis probabilities.
pub trait Measurable {
    fn n_qubits(&self) -> usize;
    fn basis_probabilities(&self) -> Vec<f64>;
}

impl Measurable for StateVector {
    fn n_qubits(&self) -> usize {
        StateVector::n_qubits(self)
    }
    fn basis_probabilities(&self) -> Vec<f64> {
        self.probabilities()
    }
}

impl Measurable for DensityMatrix {
    fn n_qubits(&self) -> usize {
        DensityMatrix::n_qubits(self)
    }
    fn basis_probabilities(&self) -> Vec<f64> {
        self.probabilities()
    }
}

/// Measure in the computational basis, with readout error when a profile is given.
pub fn measure_distribution(
    state: &impl Measurable,
    profile: Option<&NoiseProfile>,
) -> Result<OutcomeDistribution> {
    let dist = OutcomeDistribution::new(state.n_qubits(), state.basis_probabilities())?;
    match profile {
        Some(p) => dist.with_readout(p),
        None => Ok(dist),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotCounts {
    n_qubits: usize,
    shots: u64,
    counts: Vec<u64>,
}

impl ShotCounts {
    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, bitstring: &str) -> u64 {
        usize::from_str_radix(bitstring, 2)
            .ok()
            .and_then(|i| self.counts.get(i).copied())
            .unwrap_or(0)
    }

    pub fn to_map(&self) -> BTreeMap<String, u64> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (bitstring(i, self.n_qubits), c))
            .collect()
    }

    /// Empirical frequencies.
    pub fn to_distribution(&self) -> OutcomeDistribution {
        let probabilities = self
            .counts
            .iter()
            .map(|&c| c as f64 / self.shots as f64)
            .collect();
        OutcomeDistribution {
            n_qubits: self.n_qubits,
            probabilities,
        }
    }
}

/// Multinomial draw of `shots` outcomes by inverse-CDF lookup, reproducible per seed.
///
/// Panics if `shots == 0`.
pub fn sample(dist: &OutcomeDistribution, shots: u64, seed: u64) -> ShotCounts {
    assert!(shots > 0, "shots must be positive");
    let mut cumulative = Vec::with_capacity(dist.probabilities.len());
    let mut acc = 0.0;
    for p in &dist.probabilities {
        acc += p;
        cumulative.push(acc);
    }
    let last_nonzero = dist
        .probabilities
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(0);
    let mut counts = vec![0u64; dist.probabilities.len()];
    let mut rng = rng_from_seed(seed);
    for _ in 0..shots {
        let u: f64 = rng.random::<f64>() * acc;
        let idx = cumulative.partition_point(|&c| c <= u).min(last_nonzero);
        counts[idx] += 1;
    }
    ShotCounts {
        n_qubits: dist.n_qubits,
        shots,
        counts,
    }
}

/// `⟨Z_q⟩` under `dist`.
pub fn expectation_z(dist: &OutcomeDistribution, qubit: usize) -> Result<f64> {
    if qubit >= dist.n_qubits {
        return Err(Error::InvalidTarget {
            index: qubit,
            n_qubits: dist.n_qubits,
        });
    }
    let bit = 1usize << bit_position(dist.n_qubits, qubit);
    Ok(dist
        .probabilities
        .iter()
        .enumerate()
        .map(|(i, p)| if i & bit == 0 { *p } else { -*p })
        .sum())
}

/// `⟨Z_a Z_b⟩` under `dist`.
pub fn expectation_zz(dist: &OutcomeDistribution, a: usize, b: usize) -> Result<f64> {
    for q in [a, b] {
        if q >= dist.n_qubits {
            return Err(Error::InvalidTarget {
                index: q,
                n_qubits: dist.n_qubits,
            });
        }
    }
    let mask = (1usize << bit_position(dist.n_qubits, a)) | (1usize << bit_position(dist.n_qubits, b));
    Ok(dist
        .probabilities
        .iter()
        .enumerate()
        .map(|(i, p)| if (i & mask).count_ones() % 2 == 0 { *p } else { -*p })
        .sum())
}
