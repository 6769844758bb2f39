use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Split, Task};
use crate::error::{Error, Result};
use crate::qelm::{QelmConfig, ReadoutKind};
use crate::rng::{derive_seed, rng_from_seed};

pub const MIN_SAMPLES: usize = 20;
pub const TRAIN_FRACTION: f64 = 0.7;

/// Synthetic task shapes: 3-feature regression, 4- and 8-feature binary
/// classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetKind {
    Regression3,
    Classification4,
    Classification8,
}

impl DatasetKind {
    pub const ALL: [DatasetKind; 3] = [Self::Regression3, Self::Classification4, Self::Classification8];

    pub fn n_features(self) -> usize {
        match self {
            Self::Regression3 => 3,
            Self::Classification4 => 4,
            Self::Classification8 => 8,
        }
    }

    pub fn task(self) -> Task {
        match self {
            Self::Regression3 => Task::Regression,
            _ => Task::Classification,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Regression3 => "regression3",
            Self::Classification4 => "classification4",
            Self::Classification8 => "classification8",
        }
    }

    pub fn default_noise_level(self) -> f64 {
        match self {
            Self::Regression3 => 0.1,
            Self::Classification4 => 0.0,
            Self::Classification8 => 0.1,
        }
    }

    /// Readout paired with each task shape: linear regression, decision
    /// tree, and logistic regression respectively, all on an HE-Ising front.
    pub fn default_model(self) -> QelmConfig {
        QelmConfig::he_ising(match self {
            Self::Regression3 => ReadoutKind::LinearRegression,
            Self::Classification4 => ReadoutKind::DecisionTree,
            Self::Classification8 => ReadoutKind::LogisticRegression,
        })
    }
}

impl std::str::FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown dataset kind `{s}`")))
    }
}

/// Deterministic synthetic dataset with a seeded 70/30 train/test split.
///
/// * `regression3`: `x ~ U[−1, 1]³`,
///   `y = 1.5x₀ − x₁ + 0.5x₂ + 0.5·sin(πx₂) + 0.3x₀x₁ + N(0, noise²)`.
/// * `classification4`: balanced classes; every feature is
///   `0.25 + 0.5·label + U[−0.2, 0.2] + N(0, noise²)`, so noise 0 separates
///   the classes on any single feature.
/// * `classification8`: `x ~ U[0, 1]⁸` and, with `cⱼ = xⱼ − 0.5`, the label
///   is the sign of `c₀ − c₁ + 0.8(c₂ − c₃) + 4(c₄c₅ − c₆c₇) + N(0, noise²)`.
///   Half the signal sits in pairwise products, and noise controls class
///   overlap.
pub fn generate_dataset(kind: DatasetKind, n_samples: usize, seed: u64, noise_level: f64) -> Result<Split> {
    if n_samples < MIN_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_SAMPLES,
            got: n_samples,
        });
    }
    if !(noise_level >= 0.0 && noise_level.is_finite()) {
        return Err(Error::Validation(format!("noise_level must be non-negative, got {noise_level}")));
    }
    let mut rng = rng_from_seed(derive_seed(seed, 0));
    let gauss = Normal::new(0.0, 1.0).expect("unit normal");
    let noise = |rng: &mut rand_chacha::ChaCha8Rng| noise_level * gauss.sample(rng);
    let (mut x, mut y) = (Vec::with_capacity(n_samples), Vec::with_capacity(n_samples));
    for i in 0..n_samples {
        match kind {
            DatasetKind::Regression3 => {
                let r: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
                let target = 1.5 * r[0] - r[1] + 0.5 * r[2]
                    + 0.5 * (std::f64::consts::PI * r[2]).sin()
                    + 0.3 * r[0] * r[1]
                    + noise(&mut rng);
                x.push(r);
                y.push(target);
            }
            DatasetKind::Classification4 => {
                let label = (i % 2) as f64;
                let r: Vec<f64> = (0..4)
                    .map(|_| 0.25 + 0.5 * label + rng.random_range(-0.2..0.2) + noise(&mut rng))
                    .collect();
                x.push(r);
                y.push(label);
            }
            DatasetKind::Classification8 => {
                let r: Vec<f64> = (0..8).map(|_| rng.random_range(0.0..1.0)).collect();
                let c: Vec<f64> = r.iter().map(|v| v - 0.5).collect();
                let score = c[0] - c[1] + 0.8 * (c[2] - c[3]) + 4.0 * (c[4] * c[5] - c[6] * c[7]) + noise(&mut rng);
                x.push(r);
                y.push(if score > 0.0 { 1.0 } else { 0.0 });
            }
        }
    }
    let names = (0..kind.n_features()).map(|i| format!("x{i}")).collect();
    let full = Dataset::with_names(names, x, y, kind.task())?;
    let mut order: Vec<usize> = (0..n_samples).collect();
    order.shuffle(&mut rng_from_seed(derive_seed(seed, 1)));
    let n_train = (n_samples as f64 * TRAIN_FRACTION).round() as usize;
    Ok(Split {
        train: full.subset(&order[..n_train]),
        test: full.subset(&order[n_train..]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ml::{DecisionTree, TreeParams};

    #[test]
    fn deterministic_with_seventy_thirty_split() {
        let a = generate_dataset(DatasetKind::Classification8, 100, 4, 0.1).unwrap();
        assert_eq!(a, generate_dataset(DatasetKind::Classification8, 100, 4, 0.1).unwrap());
        assert_eq!((a.train.len(), a.test.len()), (70, 30));
        assert_eq!(a.train.n_features(), 8);
        assert!(generate_dataset(DatasetKind::Regression3, 10, 0, 0.1).is_err());
    }

    #[test]
    fn noiseless_classification4_is_tree_separable() {
        let s = generate_dataset(DatasetKind::Classification4, 200, 9, 0.0).unwrap();
        let params = TreeParams {
            max_depth: 3,
            min_samples_split: 2,
        };
        for part in [&s.train, &s.test] {
            let tree = DecisionTree::fit_classifier(&part.features, &part.labels(), 2, &params).unwrap();
            let correct = part
                .features
                .iter()
                .zip(part.labels())
                .filter(|(r, l)| tree.predict_proba(r)[*l] > 0.5)
                .count();
            assert_eq!(correct, part.len());
        }
        // and the classes do not overlap on feature 0
        let max0 = s.train.features.iter().zip(&s.train.targets).filter(|(_, t)| **t == 0.0).map(|(r, _)| r[0]).fold(f64::MIN, f64::max);
        let min1 = s.train.features.iter().zip(&s.train.targets).filter(|(_, t)| **t == 1.0).map(|(r, _)| r[0]).fold(f64::MAX, f64::min);
        assert!(max0 < min1);
    }

    #[test]
    fn regression_signal_dominates_noise() {
        let s = generate_dataset(DatasetKind::Regression3, 400, 2, DatasetKind::Regression3.default_noise_level()).unwrap();
        let y = &s.train.targets;
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / y.len() as f64;
        assert!(var > 10.0 * 0.1f64.powi(2));
    }
}
