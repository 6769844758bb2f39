use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Split, Task};
use crate::error::{Error, Result};
use crate::mitigation::{default_corpus, qlear_train, QlearParams, ZneConfig};
use crate::noise::NoiseProfile;
use crate::qelm::{train, ExecutionBackend, FeatureCache, Mitigator, Prediction, QelmConfig, QelmModel};
use crate::rng::derive_seed;
use crate::uq::{
    bootstrap_distribution, ensemble_distribution, summarize_classification, summarize_regression, ClassificationUq,
    Extraction, PredictionDistribution, RegressionUq,
};

use super::stats::{a12, mann_whitney_u, percent_change, EffectThresholds, MannWhitney, MetricKind};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_REPEATS: usize = 10;
pub const DEFAULT_SHOTS: u64 = 4096;
/// Random circuits in a Q-LEAR calibration corpus; the first training inputs
/// run through the QELM front end make up the rest.
pub const QLEAR_RANDOM_CIRCUITS: usize = 30;
pub const QLEAR_FRONT_CIRCUITS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Ideal,
    Noisy,
    Mitigated,
}

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioId {
    C1_1,
    C1_2,
    C2_1,
    C2_2,
    C3_1,
    C3_2,
    C3_3,
    C3_4,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 8] = [
        Self::C1_1,
        Self::C1_2,
        Self::C2_1,
        Self::C2_2,
        Self::C3_1,
        Self::C3_2,
        Self::C3_3,
        Self::C3_4,
    ];

    /// `(train, test)` backends.
    pub fn backends(self) -> (BackendKind, BackendKind) {
        use BackendKind::*;
        match self {
            Self::C1_1 | Self::C3_1 => (Ideal, Noisy),
            Self::C1_2 | Self::C3_2 => (Noisy, Noisy),
            Self::C2_1 | Self::C3_3 => (Ideal, Mitigated),
            Self::C2_2 | Self::C3_4 => (Mitigated, Mitigated),
        }
    }

    pub fn requires_uq(self) -> bool {
        matches!(self, Self::C3_1 | Self::C3_2 | Self::C3_3 | Self::C3_4)
    }

    pub fn is_mitigated(self) -> bool {
        let (a, b) = self.backends();
        a == BackendKind::Mitigated || b == BackendKind::Mitigated
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::C1_1 => "C1_1",
            Self::C1_2 => "C1_2",
            Self::C2_1 => "C2_1",
            Self::C2_2 => "C2_2",
            Self::C3_1 => "C3_1",
            Self::C3_2 => "C3_2",
            Self::C3_3 => "C3_3",
            Self::C3_4 => "C3_4",
        }
    }
}

impl std::fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.replace('.', "_").to_ascii_uppercase();
        Self::ALL
            .into_iter()
            .find(|id| id.name() == wanted)
            .ok_or_else(|| Error::Parse(format!("unknown scenario `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MitigatorKind {
    Zne,
    Qlear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum UqSettings {
    Bootstrap { resamples: usize },
    Ensemble { members: usize },
}

impl UqSettings {
    pub fn bootstrap() -> Self {
        Self::Bootstrap { resamples: 100 }
    }

    pub fn ensemble() -> Self {
        Self::Ensemble { members: 30 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub id: ScenarioId,
    pub train_backend: BackendKind,
    pub test_backend: BackendKind,
    pub mitigator: Option<MitigatorKind>,
    pub profile: NoiseProfile,
    pub repeats: usize,
    pub uq: Option<UqSettings>,
    pub seed: u64,
    /// Shots per circuit execution on noisy and mitigated backends; `0`
    /// keeps exact probabilities. Ideal backends are always exact, and this
    /// value replaces the model's own shot count.
    pub shots: u64,
    pub zne: ZneConfig,
    pub qlear: QlearParams,
    /// Miscoverage level of regression prediction intervals.
    pub alpha: f64,
    pub reliability_bins: usize,
    pub effect_thresholds: Option<EffectThresholds>,
}

impl ScenarioConfig {
    /// Defaults for `id`: backends from the id, ten repeats, bootstrap UQ
    /// for the C3 family, ZNE as mitigator for mitigated scenarios.
    pub fn new(id: ScenarioId, profile: NoiseProfile, seed: u64) -> Self {
        let (train_backend, test_backend) = id.backends();
        Self {
            id,
            train_backend,
            test_backend,
            mitigator: id.is_mitigated().then_some(MitigatorKind::Zne),
            profile,
            repeats: DEFAULT_REPEATS,
            uq: id.requires_uq().then(UqSettings::bootstrap),
            seed,
            shots: DEFAULT_SHOTS,
            zne: ZneConfig::default(),
            qlear: QlearParams::default(),
            alpha: 0.05,
            reliability_bins: 10,
            effect_thresholds: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::Validation(msg));
        if (self.train_backend, self.test_backend) != self.id.backends() {
            return invalid(format!(
                "scenario {} runs {:?}/{:?}, config says {:?}/{:?}",
                self.id,
                self.id.backends().0,
                self.id.backends().1,
                self.train_backend,
                self.test_backend
            ));
        }
        match (self.id.is_mitigated(), self.mitigator) {
            (true, None) => return invalid(format!("mitigator: scenario {} needs a mitigator", self.id)),
            (false, Some(_)) => return invalid(format!("mitigator: scenario {} runs no mitigated backend", self.id)),
            _ => {}
        }
        if self.id.requires_uq() && self.uq.is_none() {
            return invalid(format!("uq: scenario {} requires uncertainty quantification", self.id));
        }
        match self.uq {
            Some(UqSettings::Bootstrap { resamples }) if resamples < 2 => {
                return invalid("uq: bootstrap needs at least 2 resamples".into())
            }
            Some(UqSettings::Ensemble { members }) if members < 2 => {
                return invalid("uq: ensemble needs at least 2 members".into())
            }
            _ => {}
        }
        if self.repeats == 0 {
            return invalid("repeats: must be at least 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return invalid(format!("alpha: must lie in (0, 1), got {}", self.alpha));
        }
        if self.reliability_bins == 0 {
            return invalid("reliability_bins: must be at least 1".into());
        }
        if let Some(t) = &self.effect_thresholds {
            t.validate()?;
        }
        if self.mitigator == Some(MitigatorKind::Zne) {
            self.zne.validate()?;
        }
        self.profile.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepeatStatus {
    Ok,
    /// The metric was computed but no percentage change could be formed.
    Flagged,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatRecord {
    pub repeat: usize,
    pub seed: u64,
    pub metric: Option<f64>,
    pub percent_change: Option<f64>,
    pub status: RepeatStatus,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statistics {
    /// Compared samples: scenario percentage changes against the ideal
    /// repeats' percentage changes. `Â12 > 0.5` means the scenario degrades.
    pub mann_whitney: MannWhitney,
    pub a12: f64,
    pub effect: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case")]
pub enum UqSummary {
    Regression(RegressionUq),
    Classification(ClassificationUq),
}

impl UqSummary {
    pub fn mean_width(&self) -> Option<f64> {
        match self {
            Self::Regression(r) => Some(r.mean_width),
            Self::Classification(_) => None,
        }
    }
}

/// UQ of the scenario's backends next to the same procedure on ideal
/// backends, both with repeat 0's seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UqReport {
    pub settings: UqSettings,
    pub seed: u64,
    pub scenario: UqSummary,
    pub ideal: UqSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MitigationInfo {
    pub kind: MitigatorKind,
    /// Held-out mean absolute feature error of a Q-LEAR corrector, after and
    /// before correction.
    pub qlear_heldout_mae: Option<f64>,
    pub qlear_unmitigated_mae: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub task: Task,
    pub n_features: usize,
    pub n_train: usize,
    pub n_test: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub schema_version: u32,
    pub scenario: ScenarioId,
    pub model_name: String,
    pub model: QelmConfig,
    pub config: ScenarioConfig,
    pub dataset: DatasetSummary,
    pub metric: MetricKind,
    /// Mean metric of the successful ideal-backend repeats.
    pub ideal_value: Option<f64>,
    pub ideal_repeats: Vec<RepeatRecord>,
    pub repeats: Vec<RepeatRecord>,
    pub median_percent_change: Option<f64>,
    pub statistics: Option<Statistics>,
    pub mitigation: Option<MitigationInfo>,
    pub uq: Option<UqReport>,
    pub notes: Vec<String>,
}

impl ScenarioReport {
    pub fn percent_changes(&self) -> Vec<f64> {
        self.repeats.iter().filter_map(|r| r.percent_change).collect()
    }

    pub fn ideal_percent_changes(&self) -> Vec<f64> {
        self.ideal_repeats.iter().filter_map(|r| r.percent_change).collect()
    }
}

fn metric_kind(task: Task) -> MetricKind {
    match task {
        Task::Regression => MetricKind::Error,
        Task::Classification => MetricKind::Accuracy,
    }
}

fn evaluate(predictions: &[Prediction], targets: &[f64], task: Task) -> f64 {
    let n = targets.len() as f64;
    match task {
        Task::Regression => predictions.iter().zip(targets).map(|(p, t)| (p.value() - t).powi(2)).sum::<f64>() / n,
        Task::Classification => {
            predictions.iter().zip(targets).filter(|(p, t)| p.value() == **t).count() as f64 / n
        }
    }
}

fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { (v[m - 1] + v[m]) / 2.0 })
}

/// Resolved execution backends of a scenario with the shot count each
/// extraction uses (`0` on ideal backends).
#[derive(Debug, Clone)]
pub struct ScenarioBackends {
    pub train: ExecutionBackend,
    pub test: ExecutionBackend,
    pub train_shots: u64,
    pub test_shots: u64,
}

impl ScenarioBackends {
    pub fn ideal() -> Self {
        Self {
            train: ExecutionBackend::Ideal,
            test: ExecutionBackend::Ideal,
            train_shots: 0,
            test_shots: 0,
        }
    }

    fn of(config: &ScenarioConfig, mitigator: Option<&Mitigator>) -> Self {
        let shots = |kind| if kind == BackendKind::Ideal { 0 } else { config.shots };
        Self {
            train: resolve(config.train_backend, &config.profile, mitigator),
            test: resolve(config.test_backend, &config.profile, mitigator),
            train_shots: shots(config.train_backend),
            test_shots: shots(config.test_backend),
        }
    }
}

fn resolve(kind: BackendKind, profile: &NoiseProfile, mitigator: Option<&Mitigator>) -> ExecutionBackend {
    match kind {
        BackendKind::Ideal => ExecutionBackend::Ideal,
        BackendKind::Noisy => ExecutionBackend::Noisy(profile.clone()),
        BackendKind::Mitigated => ExecutionBackend::Mitigated {
            profile: profile.clone(),
            mitigator: mitigator.expect("validated: mitigator present").clone(),
        },
    }
}

fn with_shots(model: &QelmConfig, shots: u64) -> QelmConfig {
    let mut model = model.clone();
    model.feature_map.shots = shots;
    model
}

/// Train on the training rows, test on the test rows; returns the metric.
fn run_once(
    split: &Split,
    model: &QelmConfig,
    backends: &ScenarioBackends,
    seed: u64,
    cache: &FeatureCache,
) -> Result<f64> {
    let mut trained = train(
        &split.train,
        &with_shots(model, backends.train_shots),
        &backends.train,
        derive_seed(seed, 0),
        Some(cache),
    )?;
    trained.front.feature_map.shots = backends.test_shots;
    let predictions = trained.predict_rows(&split.test.features, &backends.test, derive_seed(seed, 1), Some(cache))?;
    Ok(evaluate(&predictions, &split.test.targets, split.train.task))
}

fn run_repeats(
    config: &ScenarioConfig,
    split: &Split,
    model: &QelmConfig,
    backends: &ScenarioBackends,
    cache: &FeatureCache,
) -> Vec<RepeatRecord> {
    (0..config.repeats)
        .into_par_iter()
        .map(|r| {
            let seed = derive_seed(config.seed, r as u64);
            let outcome = run_once(split, model, backends, seed, cache);
            RepeatRecord {
                repeat: r,
                seed,
                metric: outcome.as_ref().ok().copied(),
                percent_change: None,
                status: if outcome.is_ok() { RepeatStatus::Ok } else { RepeatStatus::Failed },
                error: outcome.err().map(|e| e.to_string()),
            }
        })
        .collect()
}

/// Ideal features are exact, so the baseline is computed once and shared by
/// every repeat row.
fn ideal_repeats(config: &ScenarioConfig, split: &Split, model: &QelmConfig, cache: &FeatureCache) -> Vec<RepeatRecord> {
    let outcome = run_once(split, model, &ScenarioBackends::ideal(), derive_seed(config.seed, 0), cache);
    (0..config.repeats)
        .map(|r| RepeatRecord {
            repeat: r,
            seed: derive_seed(config.seed, r as u64),
            metric: outcome.as_ref().ok().copied(),
            percent_change: None,
            status: if outcome.is_ok() { RepeatStatus::Ok } else { RepeatStatus::Failed },
            error: outcome.as_ref().err().map(|e| e.to_string()),
        })
        .collect()
}

fn fill_percent_changes(records: &mut [RepeatRecord], ideal: Option<f64>, metric: MetricKind) {
    for rec in records.iter_mut() {
        let Some(value) = rec.metric else { continue };
        let change = ideal
            .ok_or(Error::EmptyInput)
            .and_then(|ideal| percent_change(ideal, value, metric));
        match change {
            Ok(c) => rec.percent_change = Some(c),
            Err(e) => {
                rec.status = RepeatStatus::Flagged;
                rec.error = Some(e.to_string());
            }
        }
    }
}

fn build_mitigator(
    config: &ScenarioConfig,
    split: &Split,
    model: &QelmConfig,
) -> Result<Option<(Mitigator, MitigationInfo)>> {
    let Some(kind) = config.mitigator else { return Ok(None) };
    Ok(Some(match kind {
        MitigatorKind::Zne => (
            Mitigator::Zne(config.zne.clone()),
            MitigationInfo {
                kind,
                qlear_heldout_mae: None,
                qlear_unmitigated_mae: None,
            },
        ),
        MitigatorKind::Qlear => {
            let front = model.front(&split.train.feature_ranges())?;
            let mut corpus = default_corpus(front.n_qubits(), QLEAR_RANDOM_CIRCUITS, derive_seed(config.seed, u64::MAX));
            for x in split.train.features.iter().take(QLEAR_FRONT_CIRCUITS) {
                corpus.push(front.circuit(x)?);
            }
            let params = QlearParams {
                seed: derive_seed(config.qlear.seed, config.seed),
                ..config.qlear
            };
            let corrector = qlear_train(&corpus, &config.profile, model.feature_map.kind, &params)?;
            let info = MitigationInfo {
                kind,
                qlear_heldout_mae: Some(corrector.heldout_mae),
                qlear_unmitigated_mae: Some(corrector.unmitigated_mae),
            };
            (Mitigator::Qlear(Arc::new(corrector)), info)
        }
    }))
}

fn uq_summary(
    settings: UqSettings,
    config: &ScenarioConfig,
    split: &Split,
    model: &QelmConfig,
    backends: &ScenarioBackends,
    seed: u64,
    cache: &FeatureCache,
) -> Result<UqSummary> {
    let extraction = Extraction {
        train_backend: &backends.train,
        test_backend: &backends.test,
        train_seed: derive_seed(seed, 0),
        test_seed: derive_seed(seed, 1),
        cache: Some(cache),
        train_shots: Some(backends.train_shots),
        test_shots: Some(backends.test_shots),
    };
    let dist: PredictionDistribution = match settings {
        UqSettings::Bootstrap { resamples } => {
            let base: QelmModel = train(
                &split.train,
                &with_shots(model, backends.train_shots),
                &backends.train,
                extraction.train_seed,
                Some(cache),
            )?;
            bootstrap_distribution(&base, &split.train, &split.test, resamples, derive_seed(seed, 2), &extraction)?
        }
        UqSettings::Ensemble { members } => {
            ensemble_distribution(model, &split.train, &split.test, members, derive_seed(seed, 2), &extraction)?
        }
    };
    Ok(match split.test.task {
        Task::Regression => UqSummary::Regression(summarize_regression(&dist, &split.test.targets, config.alpha)?),
        Task::Classification => {
            let labels: Vec<u8> = split.test.targets.iter().map(|&t| t as u8).collect();
            UqSummary::Classification(summarize_classification(&dist, &labels, config.reliability_bins)?)
        }
    })
}

fn uq_report(
    settings: UqSettings,
    config: &ScenarioConfig,
    split: &Split,
    model: &QelmConfig,
    scenario_backends: &ScenarioBackends,
    cache: &FeatureCache,
) -> Result<UqReport> {
    let seed = derive_seed(config.seed, 0);
    Ok(UqReport {
        settings,
        seed,
        scenario: uq_summary(settings, config, split, model, scenario_backends, seed, cache)?,
        ideal: uq_summary(settings, config, split, model, &ScenarioBackends::ideal(), seed, cache)?,
    })
}

/// The execution backends of a scenario, with its mitigator built (a
/// Q-LEAR corrector is trained here).
pub fn scenario_backends(config: &ScenarioConfig, split: &Split, model: &QelmConfig) -> Result<ScenarioBackends> {
    config.validate()?;
    let mitigator = build_mitigator(config, split, model)?;
    Ok(ScenarioBackends::of(config, mitigator.as_ref().map(|m| &m.0)))
}

/// Only the UQ part of a scenario, without repeats or statistics. Uses the
/// same seeds as [`run_scenario`], so the result equals the report's `uq`.
pub fn run_uq(config: &ScenarioConfig, split: &Split, model: &QelmConfig) -> Result<UqReport> {
    config.validate()?;
    let settings = config
        .uq
        .ok_or_else(|| Error::Validation("uq: no uncertainty settings given".into()))?;
    let mitigator = build_mitigator(config, split, model)?;
    let backends = ScenarioBackends::of(config, mitigator.as_ref().map(|m| &m.0));
    uq_report(settings, config, split, model, &backends, &FeatureCache::new())
}

/// Run a scenario: the exact ideal/ideal baseline, then the configured
/// backends once per repeat with seeds `derive_seed(config.seed, r)`.
///
/// Every repeat's percentage change is taken against the ideal metric, and
/// the statistics compare them with the baseline's repeat set.
/// Failures inside a repeat are recorded in that repeat's row; only invalid
/// configuration and mitigator or UQ failures abort the run.
pub fn run_scenario(config: &ScenarioConfig, split: &Split, model: &QelmConfig) -> Result<ScenarioReport> {
    config.validate()?;
    if split.train.task != split.test.task {
        return Err(Error::Validation("train and test sets have different tasks".into()));
    }
    if split.train.is_empty() || split.test.is_empty() {
        return Err(Error::EmptyInput);
    }
    let task = split.train.task;
    let metric = metric_kind(task);
    let model = with_shots(model, config.shots);

    let cache = FeatureCache::new();
    let mut notes = Vec::new();
    let mitigator = build_mitigator(config, split, &model)?;
    let scenario_backends = ScenarioBackends::of(config, mitigator.as_ref().map(|m| &m.0));

    let mut ideal_repeats = ideal_repeats(config, split, &model, &cache);
    let mut repeats = run_repeats(config, split, &model, &scenario_backends, &cache);

    let ideal_metrics: Vec<f64> = ideal_repeats.iter().filter_map(|r| r.metric).collect();
    let ideal_value = (!ideal_metrics.is_empty()).then(|| ideal_metrics.iter().sum::<f64>() / ideal_metrics.len() as f64);
    fill_percent_changes(&mut ideal_repeats, ideal_value, metric);
    fill_percent_changes(&mut repeats, ideal_value, metric);

    let scenario_changes: Vec<f64> = repeats.iter().filter_map(|r| r.percent_change).collect();
    let ideal_changes: Vec<f64> = ideal_repeats.iter().filter_map(|r| r.percent_change).collect();
    let statistics = match (mann_whitney_u(&scenario_changes, &ideal_changes), a12(&scenario_changes, &ideal_changes)) {
        (Ok(mw), Ok(a)) => Some(Statistics {
            mann_whitney: mw,
            a12: a,
            effect: config.effect_thresholds.map(|t| t.label(a).to_owned()),
        }),
        (Err(e), _) | (_, Err(e)) => {
            notes.push(format!("statistics skipped: {e}"));
            None
        }
    };
    let failed = repeats.iter().chain(&ideal_repeats).filter(|r| r.status != RepeatStatus::Ok).count();
    if failed > 0 {
        notes.push(format!("{failed} repeat(s) failed or were flagged"));
    }

    let uq = match config.uq {
        None => None,
        Some(settings) => Some(uq_report(settings, config, split, &model, &scenario_backends, &cache)?),
    };

    Ok(ScenarioReport {
        schema_version: REPORT_SCHEMA_VERSION,
        scenario: config.id,
        model_name: model.name(),
        model,
        config: config.clone(),
        dataset: DatasetSummary {
            task,
            n_features: split.train.n_features(),
            n_train: split.train.len(),
            n_test: split.test.len(),
        },
        metric,
        ideal_value,
        median_percent_change: median(&scenario_changes),
        ideal_repeats,
        repeats,
        statistics,
        mitigation: mitigator.map(|m| m.1),
        uq,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{generate_dataset, DatasetKind};
    use crate::qelm::ReadoutKind;

    fn small_regression() -> Split {
        generate_dataset(DatasetKind::Regression3, 40, 5, 0.1).unwrap()
    }

    #[test]
    fn ids_map_to_backends() {
        use BackendKind::*;
        assert_eq!(ScenarioId::C1_1.backends(), (Ideal, Noisy));
        assert_eq!(ScenarioId::C2_2.backends(), (Mitigated, Mitigated));
        assert_eq!(ScenarioId::C3_3.backends(), (Ideal, Mitigated));
        assert_eq!("c3.2".parse::<ScenarioId>().unwrap(), ScenarioId::C3_2);
        assert!("C4_1".parse::<ScenarioId>().is_err());
        assert!(ScenarioId::C3_1.requires_uq() && !ScenarioId::C1_2.requires_uq());
    }

    #[test]
    fn mitigator_required_iff_mitigated() {
        let mut c = ScenarioConfig::new(ScenarioId::C2_1, NoiseProfile::ideal(3), 0);
        c.mitigator = None;
        assert!(matches!(c.validate(), Err(Error::Validation(m)) if m.contains("mitigator")));
        let mut c = ScenarioConfig::new(ScenarioId::C1_1, NoiseProfile::ideal(3), 0);
        c.mitigator = Some(MitigatorKind::Qlear);
        assert!(c.validate().is_err());
        let mut c = ScenarioConfig::new(ScenarioId::C3_2, NoiseProfile::ideal(3), 0);
        c.uq = None;
        assert!(c.validate().is_err());
        let mut c = ScenarioConfig::new(ScenarioId::C1_2, NoiseProfile::ideal(3), 0);
        c.test_backend = BackendKind::Ideal;
        assert!(c.validate().is_err());
    }

    #[test]
    fn zero_noise_changes_nothing() {
        let split = small_regression();
        let mut config = ScenarioConfig::new(ScenarioId::C1_1, NoiseProfile::ideal(3), 11);
        config.repeats = 4;
        config.shots = 0;
        let report = run_scenario(&config, &split, &DatasetKind::Regression3.default_model()).unwrap();
        assert_eq!(report.repeats.len(), 4);
        for (r, i) in report.repeats.iter().zip(&report.ideal_repeats) {
            assert_eq!(r.metric, i.metric);
            assert_eq!(r.status, RepeatStatus::Ok);
        }
        assert!(report.percent_changes().iter().all(|&c| c == 0.0));
        let stats = report.statistics.unwrap();
        assert_eq!(stats.a12, 0.5);
        assert_eq!(stats.mann_whitney.p_value, 1.0);
    }

    #[test]
    fn baseline_is_exact_and_noisy_side_samples() {
        let split = small_regression();
        let mut config = ScenarioConfig::new(ScenarioId::C1_1, NoiseProfile::ideal(3), 3);
        config.repeats = 3;
        config.shots = 64;
        let report = run_scenario(&config, &split, &DatasetKind::Regression3.default_model()).unwrap();
        assert!(report.ideal_repeats.iter().all(|r| r.metric == report.ideal_value));
        assert!(report.ideal_percent_changes().iter().all(|&c| c == 0.0));
        let metrics: Vec<f64> = report.repeats.iter().filter_map(|r| r.metric).collect();
        assert!(metrics.iter().any(|&m| Some(m) != report.ideal_value));
        assert!(metrics.windows(2).any(|w| w[0] != w[1]));
    }

    #[test]
    fn reruns_are_identical() {
        let split = small_regression();
        let mut config = ScenarioConfig::new(ScenarioId::C3_2, NoiseProfile::depolarizing(3, 0.02, 0.05), 4);
        config.repeats = 3;
        config.uq = Some(UqSettings::Bootstrap { resamples: 10 });
        let model = QelmConfig::he_ising(ReadoutKind::LinearRegression);
        let a = run_scenario(&config, &split, &model).unwrap();
        let b = run_scenario(&config, &split, &model).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.uq, Some(run_uq(&config, &split, &model).unwrap()));
    }

    #[test]
    fn qlear_scenario_records_corrector_quality() {
        let split = small_regression();
        let mut config = ScenarioConfig::new(ScenarioId::C2_1, NoiseProfile::depolarizing(3, 0.02, 0.05), 1);
        config.repeats = 3;
        config.mitigator = Some(MitigatorKind::Qlear);
        let report = run_scenario(&config, &split, &DatasetKind::Regression3.default_model()).unwrap();
        let info = report.mitigation.unwrap();
        assert!(info.qlear_heldout_mae.unwrap().is_finite());
        assert!(report.repeats.iter().all(|r| r.status == RepeatStatus::Ok));
    }
}
