use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Task};
use crate::error::{Error, Result};
use crate::ml::{DecisionTree, LinearReadout, LogisticParams, LogisticReadout, TreeParams};

use super::backend::ExecutionBackend;
use super::encoder::EncoderSpec;
use super::features::{FeatureKind, FeatureMapSpec};
use super::front::{FeatureCache, QelmFront};
use super::reservoir::{ReservoirSpec, ReservoirStyle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReadoutKind {
    LinearRegression,
    LogisticRegression,
    DecisionTree,
}

impl ReadoutKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::LinearRegression => "LinearRegression",
            Self::LogisticRegression => "LogisticRegression",
            Self::DecisionTree => "DecisionTree",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadoutHyper {
    pub ridge: f64,
    pub logistic: LogisticParams,
    pub tree: TreeParams,
}

impl Default for ReadoutHyper {
    fn default() -> Self {
        Self {
            ridge: 1e-8,
            logistic: LogisticParams::default(),
            tree: TreeParams::default(),
        }
    }
}

/// A trained readout. Trees on regression tasks predict leaf means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Readout {
    LinearRegression(LinearReadout),
    LogisticRegression(LogisticReadout),
    DecisionTree(DecisionTree),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Prediction {
    Value(f64),
    Class { label: usize, probabilities: Vec<f64> },
}

impl Prediction {
    pub fn value(&self) -> f64 {
        match self {
            Self::Value(v) => *v,
            Self::Class { label, .. } => *label as f64,
        }
    }

    /// Positive-class probability (`1.0`/`0.0` is never synthesized for
    /// regression values; those return the value itself).
    pub fn positive_probability(&self) -> f64 {
        match self {
            Self::Value(v) => *v,
            Self::Class { probabilities, .. } => probabilities.get(1).copied().unwrap_or(0.0),
        }
    }
}

fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in p.iter().enumerate() {
        if *v > p[best] {
            best = i;
        }
    }
    best
}

/// Fit a readout on `features` (one row per sample). Classification
/// targets are the labels `0.0`/`1.0`.
pub fn fit_readout(
    features: &[Vec<f64>],
    targets: &[f64],
    kind: ReadoutKind,
    task: Task,
    hyper: &ReadoutHyper,
) -> Result<Readout> {
    match (kind, task) {
        (ReadoutKind::LinearRegression, Task::Regression) => {
            Ok(Readout::LinearRegression(LinearReadout::fit(features, targets, hyper.ridge)?))
        }
        (ReadoutKind::LogisticRegression, Task::Classification) => Ok(Readout::LogisticRegression(
            LogisticReadout::fit(features, targets, &hyper.logistic)?,
        )),
        (ReadoutKind::DecisionTree, Task::Classification) => {
            let labels: Vec<usize> = targets.iter().map(|&t| t as usize).collect();
            Ok(Readout::DecisionTree(DecisionTree::fit_classifier(features, &labels, 2, &hyper.tree)?))
        }
        (ReadoutKind::DecisionTree, Task::Regression) => {
            Ok(Readout::DecisionTree(DecisionTree::fit_regressor(features, targets, &hyper.tree)?))
        }
        (kind, task) => Err(Error::Validation(format!(
            "{} readout does not support {task:?}",
            kind.name()
        ))),
    }
}

impl Readout {
    pub fn input_dim(&self) -> usize {
        match self {
            Self::LinearRegression(m) => m.weights.len(),
            Self::LogisticRegression(m) => m.weights.len(),
            Self::DecisionTree(t) => t.n_features,
        }
    }

    pub fn apply(&self, features: &[f64], task: Task) -> Prediction {
        match (self, task) {
            (Self::LinearRegression(m), _) => Prediction::Value(m.predict(features)),
            (Self::LogisticRegression(m), _) => {
                let p = m.predict_proba(features);
                let probabilities = vec![1.0 - p, p];
                Prediction::Class {
                    label: argmax(&probabilities),
                    probabilities,
                }
            }
            (Self::DecisionTree(t), Task::Regression) => Prediction::Value(t.predict_value(features)),
            (Self::DecisionTree(t), Task::Classification) => {
                let probabilities = t.predict_proba(features);
                Prediction::Class {
                    label: argmax(&probabilities),
                    probabilities,
                }
            }
        }
    }
}

/// Model recipe: everything needed to train except data and backend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QelmConfig {
    pub entangle: bool,
    pub reservoir: ReservoirStyle,
    pub reservoir_seed: u64,
    pub feature_map: FeatureMapSpec,
    pub readout: ReadoutKind,
    #[serde(default)]
    pub hyper: ReadoutHyper,
}

impl QelmConfig {
    /// HE encoder, Ising reservoir, exact probability features. The encoder
    /// ring is left off: the Ising couplings already entangle every pair.
    pub fn he_ising(readout: ReadoutKind) -> Self {
        Self {
            entangle: false,
            reservoir: ReservoirStyle::ising(),
            reservoir_seed: 0,
            feature_map: FeatureMapSpec::exact(FeatureKind::Probabilities),
            readout,
            hyper: ReadoutHyper::default(),
        }
    }

    /// Encoder-reservoir-readout name, e.g. `HE-Ising-LinearRegression`.
    pub fn name(&self) -> String {
        format!("HE-{}-{}", self.reservoir.name(), self.readout.name())
    }

    /// Front end for a dataset with the given feature ranges.
    pub fn front(&self, ranges: &[(f64, f64)]) -> Result<QelmFront> {
        Ok(QelmFront {
            encoder: EncoderSpec::fit(ranges, self.entangle)?,
            reservoir: ReservoirSpec {
                n_qubits: ranges.len(),
                seed: self.reservoir_seed,
                style: self.reservoir.clone(),
            },
            feature_map: self.feature_map,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QelmModel {
    pub front: QelmFront,
    pub readout: Readout,
    pub readout_kind: ReadoutKind,
    pub hyper: ReadoutHyper,
    pub task: Task,
}

/// Train on `dataset`, extracting features on `backend`; row `i` samples
/// with `derive_seed(seed, i)`.
pub fn train(
    dataset: &Dataset,
    config: &QelmConfig,
    backend: &ExecutionBackend,
    seed: u64,
    cache: Option<&FeatureCache>,
) -> Result<QelmModel> {
    if dataset.is_empty() {
        return Err(Error::EmptyInput);
    }
    let front = config.front(&dataset.feature_ranges())?;
    let features = front.extract_rows(&dataset.features, backend, seed, cache)?;
    QelmModel::fit(front, &features, dataset, config.readout, &config.hyper)
}

impl QelmModel {
    /// Fit only the readout on already extracted features.
    pub fn fit(
        front: QelmFront,
        features: &[Vec<f64>],
        dataset: &Dataset,
        readout_kind: ReadoutKind,
        hyper: &ReadoutHyper,
    ) -> Result<Self> {
        let readout = fit_readout(features, &dataset.targets, readout_kind, dataset.task, hyper)?;
        Ok(Self {
            front,
            readout,
            readout_kind,
            hyper: *hyper,
            task: dataset.task,
        })
    }

    /// Same front end, readout refitted on `features`/`targets`.
    pub fn refit(&self, features: &[Vec<f64>], targets: &[f64]) -> Result<Self> {
        Ok(Self {
            readout: fit_readout(features, targets, self.readout_kind, self.task, &self.hyper)?,
            ..self.clone()
        })
    }

    pub fn predict(&self, x: &[f64], backend: &ExecutionBackend, seed: u64) -> Result<Prediction> {
        let features = self.front.extract_features(x, backend, seed)?;
        Ok(self.predict_features(&features))
    }

    pub fn predict_rows(
        &self,
        rows: &[Vec<f64>],
        backend: &ExecutionBackend,
        seed: u64,
        cache: Option<&FeatureCache>,
    ) -> Result<Vec<Prediction>> {
        let features = self.front.extract_rows(rows, backend, seed, cache)?;
        Ok(features.iter().map(|f| self.predict_features(f)).collect())
    }

    pub fn predict_features(&self, features: &[f64]) -> Prediction {
        self.readout.apply(features, self.task)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: Self = serde_json::from_str(text)?;
        if model.readout.input_dim() != model.front.feature_dim() {
            return Err(Error::DimensionMismatch {
                expected: model.front.feature_dim(),
                got: model.readout.input_dim(),
            });
        }
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    fn linear_regression_data(n: usize, seed: u64) -> Dataset {
        let mut rng = rng_from_seed(seed);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for _ in 0..n {
            let row: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            y.push(2.0 * row[0] - row[1] + 0.5 * row[2] + rng.random_range(-0.1..0.1));
            x.push(row);
        }
        Dataset::new(x, y, Task::Regression).unwrap()
    }

    fn separable_classification(n: usize, seed: u64) -> Dataset {
        let mut rng = rng_from_seed(seed);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..n {
            let label = i % 2;
            let centre = if label == 1 { 0.75 } else { 0.25 };
            x.push((0..4).map(|_| centre + rng.random_range(-0.2..0.2)).collect());
            y.push(label as f64);
        }
        Dataset::new(x, y, Task::Classification).unwrap()
    }

    #[test]
    fn ideal_regression_beats_constant_predictor() {
        let data = linear_regression_data(200, 1);
        let train_set = data.subset(&(0..140).collect::<Vec<_>>());
        let test_set = data.subset(&(140..200).collect::<Vec<_>>());
        let config = QelmConfig::he_ising(ReadoutKind::LinearRegression);
        let model = train(&train_set, &config, &ExecutionBackend::Ideal, 0, None).unwrap();
        let preds = model.predict_rows(&test_set.features, &ExecutionBackend::Ideal, 1, None).unwrap();
        let mean = train_set.targets.iter().sum::<f64>() / train_set.len() as f64;
        let mse = |f: &dyn Fn(usize) -> f64| {
            test_set.targets.iter().enumerate().map(|(i, t)| (f(i) - t).powi(2)).sum::<f64>() / test_set.len() as f64
        };
        let model_mse = mse(&|i| preds[i].value());
        let const_mse = mse(&|_| mean);
        assert!(model_mse * 2.0 <= const_mse, "{model_mse} vs {const_mse}");
    }

    #[test]
    fn ideal_classification_is_accurate() {
        let data = separable_classification(120, 2);
        let train_set = data.subset(&(0..84).collect::<Vec<_>>());
        let test_set = data.subset(&(84..120).collect::<Vec<_>>());
        for readout in [ReadoutKind::DecisionTree, ReadoutKind::LogisticRegression] {
            let config = QelmConfig::he_ising(readout);
            let model = train(&train_set, &config, &ExecutionBackend::Ideal, 0, None).unwrap();
            let preds = model.predict_rows(&test_set.features, &ExecutionBackend::Ideal, 1, None).unwrap();
            let correct = preds.iter().zip(test_set.labels()).filter(|(p, l)| p.value() as usize == *l).count();
            let acc = correct as f64 / test_set.len() as f64;
            assert!(acc >= 0.9, "{readout:?}: {acc}");
            for p in &preds {
                let Prediction::Class { label, probabilities } = p else { panic!() };
                assert!((probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                assert_eq!(*label, argmax(probabilities));
            }
        }
    }

    #[test]
    fn training_leaves_reservoir_untouched_and_is_deterministic() {
        let data = linear_regression_data(30, 3);
        let config = QelmConfig::he_ising(ReadoutKind::LinearRegression);
        let before = config.front(&data.feature_ranges()).unwrap().reservoir_circuit();
        let a = train(&data, &config, &ExecutionBackend::Ideal, 0, None).unwrap();
        let b = train(&data, &config, &ExecutionBackend::Ideal, 0, None).unwrap();
        assert_eq!(a.front.reservoir_circuit(), before);
        assert_eq!(a, b);
    }

    #[test]
    fn mismatched_input_length() {
        let data = linear_regression_data(30, 3);
        let model = train(&data, &QelmConfig::he_ising(ReadoutKind::LinearRegression), &ExecutionBackend::Ideal, 0, None)
            .unwrap();
        assert!(matches!(
            model.predict(&[0.1, 0.2], &ExecutionBackend::Ideal, 0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn readout_task_compatibility() {
        let x = vec![vec![0.0], vec![1.0]];
        assert!(fit_readout(&x, &[0.0, 1.0], ReadoutKind::LinearRegression, Task::Classification, &ReadoutHyper::default())
            .is_err());
        assert!(fit_readout(&x, &[0.0, 1.0], ReadoutKind::DecisionTree, Task::Regression, &ReadoutHyper::default())
            .is_ok());
    }

    #[test]
    fn json_round_trip() {
        let data = separable_classification(20, 4);
        let model = train(&data, &QelmConfig::he_ising(ReadoutKind::DecisionTree), &ExecutionBackend::Ideal, 0, None)
            .unwrap();
        let back = QelmModel::from_json(&model.to_json().unwrap()).unwrap();
        assert_eq!(back, model);
        assert_eq!(QelmConfig::he_ising(ReadoutKind::DecisionTree).name(), "HE-Ising-DecisionTree");
    }
}
