use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Task};
use crate::error::{Error, Result};
use crate::qelm::{train, ExecutionBackend, FeatureCache, Prediction, QelmConfig, QelmFront, QelmModel};
use crate::rng::{derive_seed, rng_from_seed};

use super::metrics::{
    brier, covers, crps, interval_score, log_loss, mean_check_score, prediction_interval,
    reliability_diagram, ReliabilityDiagram,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UqSource {
    Bootstrap { resamples: usize },
    Ensemble { members: usize },
}

/// Per test input, one prediction from every resample or member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionDistribution {
    pub source: UqSource,
    pub task: Task,
    /// `samples[i][k]`: prediction for test input `i` by resample/member `k`.
    pub samples: Vec<Vec<Prediction>>,
}

impl PredictionDistribution {
    /// Transpose member-major predictions into input-major samples.
    fn from_members(source: UqSource, task: Task, members: Vec<Vec<Prediction>>) -> Self {
        let n_inputs = members.first().map_or(0, Vec::len);
        let samples = (0..n_inputs)
            .map(|i| members.iter().map(|m| m[i].clone()).collect())
            .collect();
        Self { source, task, samples }
    }

    pub fn n_inputs(&self) -> usize {
        self.samples.len()
    }

    /// Real-valued samples for input `i`: regression values, or
    /// positive-class probabilities for classification.
    pub fn values(&self, i: usize) -> Vec<f64> {
        self.samples[i]
            .iter()
            .map(|p| match p {
                Prediction::Value(v) => *v,
                Prediction::Class { .. } => p.positive_probability(),
            })
            .collect()
    }

    pub fn mean(&self, i: usize) -> f64 {
        let v = self.values(i);
        v.iter().sum::<f64>() / v.len() as f64
    }

    pub fn intervals(&self, alpha: f64) -> Result<Vec<(f64, f64)>> {
        (0..self.n_inputs())
            .map(|i| prediction_interval(&self.values(i), alpha))
            .collect()
    }
}

/// Readout-only resampling: the front end (and so every quantum feature) is
/// fixed; each of `resamples` draws refits the readout on rows sampled with
/// replacement.
pub fn bootstrap_from_features(
    model: &QelmModel,
    train_features: &[Vec<f64>],
    train_targets: &[f64],
    test_features: &[Vec<f64>],
    resamples: usize,
    seed: u64,
) -> Result<PredictionDistribution> {
    if resamples < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: resamples,
        });
    }
    let n = train_features.len();
    let members = (0..resamples)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng_from_seed(derive_seed(seed, b as u64));
            let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let x: Vec<Vec<f64>> = idx.iter().map(|&i| train_features[i].clone()).collect();
            let y: Vec<f64> = idx.iter().map(|&i| train_targets[i]).collect();
            let refit = model.refit(&x, &y)?;
            Ok(test_features.iter().map(|f| refit.predict_features(f)).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PredictionDistribution::from_members(
        UqSource::Bootstrap { resamples },
        model.task,
        members,
    ))
}

/// Backends and seeds used to extract features for a UQ run.
#[derive(Debug, Clone, Copy)]
pub struct Extraction<'a> {
    pub train_backend: &'a ExecutionBackend,
    pub test_backend: &'a ExecutionBackend,
    pub train_seed: u64,
    pub test_seed: u64,
    pub cache: Option<&'a FeatureCache>,
    /// Shot counts per phase; `None` keeps the model's feature map.
    pub train_shots: Option<u64>,
    pub test_shots: Option<u64>,
}

impl<'a> Extraction<'a> {
    pub fn ideal(seed: u64) -> Extraction<'static> {
        Extraction {
            train_backend: &ExecutionBackend::Ideal,
            test_backend: &ExecutionBackend::Ideal,
            train_seed: derive_seed(seed, 0),
            test_seed: derive_seed(seed, 1),
            cache: None,
            train_shots: None,
            test_shots: None,
        }
    }
}

fn with_shots(front: &QelmFront, shots: Option<u64>) -> QelmFront {
    let mut front = front.clone();
    if let Some(s) = shots {
        front.feature_map.shots = s;
    }
    front
}

pub fn bootstrap_distribution(
    model: &QelmModel,
    train_set: &Dataset,
    test_set: &Dataset,
    resamples: usize,
    seed: u64,
    extraction: &Extraction<'_>,
) -> Result<PredictionDistribution> {
    let train_x = with_shots(&model.front, extraction.train_shots).extract_rows(
        &train_set.features,
        extraction.train_backend,
        extraction.train_seed,
        extraction.cache,
    )?;
    let test_x = with_shots(&model.front, extraction.test_shots).extract_rows(
        &test_set.features,
        extraction.test_backend,
        extraction.test_seed,
        extraction.cache,
    )?;
    bootstrap_from_features(model, &train_x, &train_set.targets, &test_x, resamples, seed)
}

/// `members` full trainings whose reservoir seeds are `derive_seed(seed, k)`.
pub fn ensemble_distribution(
    config: &QelmConfig,
    train_set: &Dataset,
    test_set: &Dataset,
    members: usize,
    seed: u64,
    extraction: &Extraction<'_>,
) -> Result<PredictionDistribution> {
    if members < 2 {
        return Err(Error::InsufficientMembers(members));
    }
    let seeds: Vec<u64> = (0..members).map(|k| derive_seed(seed, k as u64)).collect();
    ensemble_with_seeds(config, train_set, test_set, &seeds, extraction)
}

pub fn ensemble_with_seeds(
    config: &QelmConfig,
    train_set: &Dataset,
    test_set: &Dataset,
    reservoir_seeds: &[u64],
    extraction: &Extraction<'_>,
) -> Result<PredictionDistribution> {
    if reservoir_seeds.len() < 2 {
        return Err(Error::InsufficientMembers(reservoir_seeds.len()));
    }
    let members = reservoir_seeds
        .par_iter()
        .map(|&s| {
            let mut member = QelmConfig {
                reservoir_seed: s,
                ..config.clone()
            };
            if let Some(shots) = extraction.train_shots {
                member.feature_map.shots = shots;
            }
            let mut model = train(train_set, &member, extraction.train_backend, extraction.train_seed, extraction.cache)?;
            model.front = with_shots(&model.front, extraction.test_shots);
            model.predict_rows(&test_set.features, extraction.test_backend, extraction.test_seed, extraction.cache)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PredictionDistribution::from_members(
        UqSource::Ensemble {
            members: reservoir_seeds.len(),
        },
        train_set.task,
        members,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalRow {
    pub index: usize,
    pub truth: f64,
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionUq {
    pub alpha: f64,
    pub mean_width: f64,
    pub coverage: f64,
    pub mean_crps: f64,
    pub mean_check_score: f64,
    pub mean_interval_score: f64,
    pub intervals: Vec<IntervalRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationUq {
    pub brier: f64,
    pub log_loss: f64,
    /// Mean positive-class probability per test input.
    pub probabilities: Vec<f64>,
    pub reliability: ReliabilityDiagram,
}

pub fn summarize_regression(dist: &PredictionDistribution, truth: &[f64], alpha: f64) -> Result<RegressionUq> {
    if truth.len() != dist.n_inputs() {
        return Err(Error::LengthMismatch {
            left: dist.n_inputs(),
            right: truth.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = truth.len() as f64;
    let mut out = RegressionUq {
        alpha,
        mean_width: 0.0,
        coverage: 0.0,
        mean_crps: 0.0,
        mean_check_score: 0.0,
        mean_interval_score: 0.0,
        intervals: Vec::with_capacity(truth.len()),
    };
    for (i, &y) in truth.iter().enumerate() {
        let samples = dist.values(i);
        let (lo, hi) = prediction_interval(&samples, alpha)?;
        out.mean_width += (hi - lo) / n;
        out.coverage += f64::from(u8::from(covers((lo, hi), y))) / n;
        out.mean_crps += crps(&samples, y) / n;
        out.mean_check_score += mean_check_score(&samples, y) / n;
        out.mean_interval_score += interval_score(y, lo, hi, alpha)? / n;
        out.intervals.push(IntervalRow {
            index: i,
            truth: y,
            mean: samples.iter().sum::<f64>() / samples.len() as f64,
            lo,
            hi,
        });
    }
    Ok(out)
}

pub fn summarize_classification(
    dist: &PredictionDistribution,
    labels: &[u8],
    n_bins: usize,
) -> Result<ClassificationUq> {
    let probabilities: Vec<f64> = (0..dist.n_inputs()).map(|i| dist.mean(i)).collect();
    Ok(ClassificationUq {
        brier: brier(&probabilities, labels)?,
        log_loss: log_loss(&probabilities, labels)?,
        reliability: reliability_diagram(&probabilities, labels, n_bins)?,
        probabilities,
    })
}
