//! Learned error mitigation: a bagged-tree regressor that maps a noisy
//! feature value plus circuit and device metadata to the correction that
//! brings it back toward its ideal value.
//!
//! One regressor serves every feature position; the feature index is one of
//! its inputs. Schema per feature `j`:
//! `[noisy_j, depth, 1q gate count, 2q gate count, j, depol_1q, depol_2q]`,
//! target `ideal_j − noisy_j`.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::ml::{BaggedTrees, TreeParams};
use crate::noise::NoiseProfile;
use crate::qelm::FeatureKind;
use crate::rng::{derive_seed, rng_from_seed};
use crate::simulator::{ideal_distribution, noisy_distribution};

pub const MIN_CORPUS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitMeta {
    pub depth: usize,
    pub n_1q: usize,
    pub n_2q: usize,
}

impl CircuitMeta {
    pub fn of(circuit: &Circuit) -> Self {
        let (n_1q, n_2q) = circuit.count_by_arity();
        Self {
            depth: circuit.depth(),
            n_1q,
            n_2q,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QlearParams {
    pub n_trees: usize,
    pub tree: TreeParams,
    /// Fraction of corpus circuits held out to measure the corrector.
    pub holdout_fraction: f64,
    pub seed: u64,
}

impl Default for QlearParams {
    fn default() -> Self {
        Self {
            n_trees: 20,
            tree: TreeParams {
                max_depth: 6,
                min_samples_split: 2,
            },
            holdout_fraction: 0.2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QlearModel {
    pub kind: FeatureKind,
    pub profile_name: String,
    pub regressor: Option<BaggedTrees>,
    /// Mean absolute error against ideal features on held-out circuits, after
    /// and before correction.
    pub heldout_mae: f64,
    pub unmitigated_mae: f64,
    pub n_circuits: usize,
}

impl QlearModel {
    pub fn untrained(kind: FeatureKind) -> Self {
        Self {
            kind,
            profile_name: String::new(),
            regressor: None,
            heldout_mae: f64::NAN,
            unmitigated_mae: f64::NAN,
            n_circuits: 0,
        }
    }

    pub fn is_trained(&self) -> bool {
        self.regressor.is_some()
    }

    pub fn correct(&self, noisy: &[f64], meta: &CircuitMeta, profile: &NoiseProfile) -> Result<Vec<f64>> {
        qlear_correct(self, noisy, meta, profile)
    }
}

fn schema_row(value: f64, meta: &CircuitMeta, index: usize, profile: &NoiseProfile) -> Vec<f64> {
    vec![
        value,
        meta.depth as f64,
        meta.n_1q as f64,
        meta.n_2q as f64,
        index as f64,
        profile.depol_1q,
        profile.depol_2q,
    ]
}

/// Seeded random circuits on `n_qubits` whose gate counts run evenly from 2
/// to 40 across the corpus.
pub fn default_corpus(n_qubits: usize, n_circuits: usize, seed: u64) -> Vec<Circuit> {
    let kinds: &[GateKind] = if n_qubits >= 2 {
        &[GateKind::H, GateKind::X, GateKind::RX, GateKind::RY, GateKind::RZ, GateKind::CX, GateKind::ZZ]
    } else {
        &[GateKind::H, GateKind::X, GateKind::RX, GateKind::RY, GateKind::RZ]
    };
    (0..n_circuits)
        .map(|i| {
            let len = if n_circuits > 1 { 2 + 38 * i / (n_circuits - 1) } else { 2 };
            let mut rng = rng_from_seed(derive_seed(seed, i as u64));
            let mut c = Circuit::new(n_qubits);
            for _ in 0..len {
                let kind = kinds[rng.random_range(0..kinds.len())];
                let a = rng.random_range(0..n_qubits);
                let targets = if kind.n_targets() == 2 {
                    let b = (a + rng.random_range(1..n_qubits)) % n_qubits;
                    vec![a, b]
                } else {
                    vec![a]
                };
                let params = (0..kind.n_params())
                    .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
                    .collect();
                c.push(Gate::new(kind, targets, params).expect("generated gate is valid"))
                    .expect("generated targets are in range");
            }
            c
        })
        .collect()
}

struct Sample {
    meta: CircuitMeta,
    noisy: Vec<f64>,
    ideal: Vec<f64>,
}

/// Train the corrector on `(noisy, ideal)` feature pairs of the corpus.
///
/// Circuits are split by `params.holdout_fraction` (at least one held out);
/// the model is fitted on the rest and its held-out error recorded.
pub fn qlear_train(
    circuits: &[Circuit],
    profile: &NoiseProfile,
    kind: FeatureKind,
    params: &QlearParams,
) -> Result<QlearModel> {
    if circuits.len() < MIN_CORPUS {
        return Err(Error::CorpusTooSmall {
            needed: MIN_CORPUS,
            got: circuits.len(),
        });
    }
    let samples = circuits
        .par_iter()
        .map(|c| {
            Ok(Sample {
                meta: CircuitMeta::of(c),
                noisy: kind.values(&noisy_distribution(c, profile)?)?,
                ideal: kind.values(&ideal_distribution(c)?)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.shuffle(&mut rng_from_seed(params.seed));
    let n_held = ((samples.len() as f64 * params.holdout_fraction).round() as usize).clamp(1, samples.len() - 1);
    let (held, fit_idx) = order.split_at(n_held);

    let (mut x, mut y) = (Vec::new(), Vec::new());
    for &i in fit_idx {
        let s = &samples[i];
        for (j, (&noisy, &ideal)) in s.noisy.iter().zip(&s.ideal).enumerate() {
            x.push(schema_row(noisy, &s.meta, j, profile));
            y.push(ideal - noisy);
        }
    }
    let regressor = BaggedTrees::fit(&x, &y, params.n_trees, &params.tree, derive_seed(params.seed, 1))?;
    let mut model = QlearModel {
        kind,
        profile_name: profile.name.clone(),
        regressor: Some(regressor),
        heldout_mae: 0.0,
        unmitigated_mae: 0.0,
        n_circuits: circuits.len(),
    };
    let (mut after, mut before, mut count) = (0.0, 0.0, 0usize);
    for &i in held {
        let s = &samples[i];
        let corrected = qlear_correct(&model, &s.noisy, &s.meta, profile)?;
        for ((c, n), t) in corrected.iter().zip(&s.noisy).zip(&s.ideal) {
            after += (c - t).abs();
            before += (n - t).abs();
            count += 1;
        }
    }
    model.heldout_mae = after / count as f64;
    model.unmitigated_mae = before / count as f64;
    Ok(model)
}

pub fn qlear_correct(
    model: &QlearModel,
    noisy: &[f64],
    meta: &CircuitMeta,
    profile: &NoiseProfile,
) -> Result<Vec<f64>> {
    let regressor = model.regressor.as_ref().ok_or(Error::NotTrained)?;
    let mut out: Vec<f64> = noisy
        .iter()
        .enumerate()
        .map(|(j, &v)| v + regressor.predict(&schema_row(v, meta, j, profile)))
        .collect();
    model.kind.clip(&mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_too_small() {
        let corpus = default_corpus(2, 5, 0);
        assert!(matches!(
            qlear_train(&corpus, &NoiseProfile::ideal(2), FeatureKind::Probabilities, &QlearParams::default()),
            Err(Error::CorpusTooSmall { needed: 20, got: 5 })
        ));
    }

    #[test]
    fn corpus_spans_gate_counts() {
        let corpus = default_corpus(3, 20, 9);
        assert_eq!(corpus.first().unwrap().len(), 2);
        assert_eq!(corpus.last().unwrap().len(), 40);
        assert_eq!(corpus, default_corpus(3, 20, 9));
    }

    #[test]
    fn untrained_model_refuses() {
        let m = QlearModel::untrained(FeatureKind::Probabilities);
        let meta = CircuitMeta::of(&Circuit::bell());
        assert!(matches!(
            m.correct(&[0.5, 0.0, 0.0, 0.5], &meta, &NoiseProfile::ideal(2)),
            Err(Error::NotTrained)
        ));
    }

    #[test]
    fn zero_noise_learns_identity() {
        let profile = NoiseProfile::ideal(2);
        let m = qlear_train(&default_corpus(2, 20, 1), &profile, FeatureKind::Probabilities, &QlearParams::default())
            .unwrap();
        assert!(m.heldout_mae <= 1e-6);
        let input = [0.1, 0.2, 0.3, 0.4];
        let out = m.correct(&input, &CircuitMeta::of(&Circuit::bell()), &profile).unwrap();
        for (a, b) in out.iter().zip(input) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn depolarizing_corpus_improves_and_corrects_bell() {
        let profile = NoiseProfile::depolarizing(2, 0.02, 0.08);
        let m = qlear_train(&default_corpus(2, 50, 2), &profile, FeatureKind::Probabilities, &QlearParams::default())
            .unwrap();
        assert!(m.heldout_mae < m.unmitigated_mae, "{} vs {}", m.heldout_mae, m.unmitigated_mae);

        let bell = Circuit::bell();
        let ideal = ideal_distribution(&bell).unwrap();
        let noisy = noisy_distribution(&bell, &profile).unwrap();
        let corrected = m.correct(noisy.probabilities(), &CircuitMeta::of(&bell), &profile).unwrap();
        assert_eq!(corrected.len(), 4);
        assert!((corrected.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let tv = |v: &[f64]| 0.5 * v.iter().zip(ideal.probabilities()).map(|(a, b)| (a - b).abs()).sum::<f64>();
        assert!(tv(&corrected) < tv(noisy.probabilities()));
    }
}
