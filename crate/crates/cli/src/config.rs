//! Run configuration: a JSON file merged with command-line overrides.
//!
//! Every field has an embedded default, so `--print-config` with no file
//! shows the complete set. Seed priority, highest first: `--seed`, the
//! file's `seed`, the `QELM_LAB_SEED` environment variable, then 0.

use std::path::{Path, PathBuf};

use qelm_lab::harness::{
    generate_dataset, DatasetKind, EffectThresholds, MitigatorKind, ScenarioConfig, ScenarioId, UqSettings,
    DEFAULT_REPEATS, DEFAULT_SHOTS,
};
use qelm_lab::mitigation::{QlearParams, ZneConfig};
use qelm_lab::noise::NoiseProfile;
use qelm_lab::qelm::QelmConfig;
use qelm_lab::dataset::Split;
use serde::{Deserialize, Serialize};

pub const SEED_ENV: &str = "QELM_LAB_SEED";
pub const DEFAULT_OUT: &str = "qelm-out";

/// A configuration problem; the message names the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn usage<T>(field: &str, constraint: impl std::fmt::Display) -> Result<T, UsageError> {
    Err(UsageError(format!("`{field}`: {constraint}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub kind: DatasetKind,
    pub seed: u64,
    pub n_samples: usize,
    pub noise_level: f64,
}

impl DatasetConfig {
    pub fn generate(&self) -> qelm_lab::Result<Split> {
        generate_dataset(self.kind, self.n_samples, self.seed, self.noise_level)
    }
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioId,
    pub dataset: DatasetConfig,
    pub model: QelmConfig,
    /// Bundled profile name or path to a profile JSON file.
    pub profile: Option<String>,
    pub mitigator: Option<MitigatorKind>,
    pub zne: ZneConfig,
    pub qlear: QlearParams,
    pub uq: Option<UqSettings>,
    pub repeats: usize,
    pub shots: u64,
    pub alpha: f64,
    pub reliability_bins: usize,
    pub effect_thresholds: Option<EffectThresholds>,
    pub out: PathBuf,
    pub seed: u64,
    pub jobs: Option<usize>,
}

/// The file form: every field optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    scenario: Option<ScenarioId>,
    dataset: Option<FileDataset>,
    model: Option<QelmConfig>,
    profile: Option<String>,
    mitigator: Option<MitigatorKind>,
    zne: Option<ZneConfig>,
    qlear: Option<QlearParams>,
    uq: Option<UqSettings>,
    repeats: Option<usize>,
    shots: Option<u64>,
    alpha: Option<f64>,
    reliability_bins: Option<usize>,
    effect_thresholds: Option<EffectThresholds>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    jobs: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileDataset {
    kind: Option<DatasetKind>,
    seed: Option<u64>,
    n_samples: Option<usize>,
    noise_level: Option<f64>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub scenario: Option<ScenarioId>,
    pub profile: Option<String>,
    pub mitigator: Option<MitigatorKind>,
    pub repeats: Option<usize>,
    pub shots: Option<u64>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
}

/// What the command is about to run, which decides the required fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    /// Only print or train on ideal features: no profile needed.
    Inspect,
    /// Anything that executes the configured scenario's backends.
    Scenario,
}

pub fn parse_and_validate(
    file: Option<&Path>,
    overrides: &Overrides,
    env_seed: Option<&str>,
    purpose: Purpose,
) -> Result<RunConfig, UsageError> {
    let raw: FileConfig = match file {
        None => FileConfig::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| UsageError(format!("`config`: cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| UsageError(format!("`config`: {e}")))?
        }
    };
    let env_seed = match env_seed {
        None => None,
        Some(s) => match s.trim().parse::<u64>() {
            Ok(v) => Some(v),
            Err(_) => return usage(SEED_ENV, format!("must be an unsigned integer, got `{s}`")),
        },
    };
    let ds = raw.dataset.unwrap_or_default();
    let kind = ds.kind.unwrap_or(DatasetKind::Regression3);
    let scenario = overrides.scenario.or(raw.scenario).unwrap_or(ScenarioId::C1_1);
    let config = RunConfig {
        scenario,
        dataset: DatasetConfig {
            kind,
            seed: ds.seed.unwrap_or(0),
            n_samples: ds.n_samples.unwrap_or(100),
            noise_level: ds.noise_level.unwrap_or(kind.default_noise_level()),
        },
        model: raw.model.unwrap_or_else(|| kind.default_model()),
        profile: overrides.profile.clone().or(raw.profile),
        mitigator: overrides.mitigator.or(raw.mitigator),
        zne: raw.zne.unwrap_or_default(),
        qlear: raw.qlear.unwrap_or_default(),
        uq: raw.uq.or_else(|| scenario.requires_uq().then(UqSettings::bootstrap)),
        repeats: overrides.repeats.or(raw.repeats).unwrap_or(DEFAULT_REPEATS),
        shots: overrides.shots.or(raw.shots).unwrap_or(DEFAULT_SHOTS),
        alpha: raw.alpha.unwrap_or(0.05),
        reliability_bins: raw.reliability_bins.unwrap_or(10),
        effect_thresholds: raw.effect_thresholds,
        out: overrides.out.clone().or(raw.out).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        seed: overrides.seed.or(raw.seed).or(env_seed).unwrap_or(0),
        jobs: overrides.jobs.or(raw.jobs),
    };
    config.validate(purpose)?;
    Ok(config)
}

/// Resolve a bundled profile name or a profile file path.
pub fn load_profile(reference: &str) -> Result<NoiseProfile, UsageError> {
    if NoiseProfile::bundled_names().any(|n| n == reference) {
        return NoiseProfile::bundled(reference).map_err(|e| UsageError(format!("`profile`: {e}")));
    }
    let path = Path::new(reference);
    if !path.is_file() {
        return usage(
            "profile",
            format!("`{reference}` is neither a bundled profile nor an existing file"),
        );
    }
    NoiseProfile::load(path).map_err(|e| UsageError(format!("`profile`: {e}")))
}

impl RunConfig {
    pub fn validate(&self, purpose: Purpose) -> Result<(), UsageError> {
        if self.dataset.n_samples < qelm_lab::harness::MIN_SAMPLES {
            return usage(
                "dataset.n_samples",
                format!("must be at least {}, got {}", qelm_lab::harness::MIN_SAMPLES, self.dataset.n_samples),
            );
        }
        if !(self.dataset.noise_level >= 0.0 && self.dataset.noise_level.is_finite()) {
            return usage("dataset.noise_level", "must be a non-negative number");
        }
        if self.jobs == Some(0) {
            return usage("jobs", "must be at least 1");
        }
        if purpose == Purpose::Scenario {
            self.scenario_config()?;
        }
        Ok(())
    }

    pub fn profile(&self) -> Result<NoiseProfile, UsageError> {
        let Some(reference) = &self.profile else {
            return usage("profile", format!("scenario {} runs a noisy backend and needs a noise profile", self.scenario));
        };
        let profile = load_profile(reference)?;
        let n = self.dataset.kind.n_features();
        if profile.n_qubits() < n {
            return usage(
                "profile",
                format!("covers {} qubits but the dataset needs {n}", profile.n_qubits()),
            );
        }
        Ok(profile)
    }

    /// The harness configuration this run describes.
    pub fn scenario_config(&self) -> Result<ScenarioConfig, UsageError> {
        let mut c = ScenarioConfig::new(self.scenario, self.profile()?, self.seed);
        c.mitigator = self.mitigator;
        c.zne = self.zne.clone();
        c.qlear = self.qlear;
        c.uq = self.uq;
        c.repeats = self.repeats;
        c.shots = self.shots;
        c.alpha = self.alpha;
        c.reliability_bins = self.reliability_bins;
        c.effect_thresholds = self.effect_thresholds;
        c.validate().map_err(|e| {
            let text = e.to_string();
            let text = text.strip_prefix("validation failed: ").unwrap_or(&text);
            // harness messages already lead with the field name
            match text.split_once(": ") {
                Some((field, rest)) if !field.contains(' ') => UsageError(format!("`{field}`: {rest}")),
                _ => UsageError(text.to_owned()),
            }
        })?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("config serializes");
        text.push('\n');
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(text: &str) -> tempfile::NamedTempFile {
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), text).unwrap();
        f
    }

    #[test]
    fn missing_profile_is_named() {
        let err = parse_and_validate(None, &Overrides::default(), None, Purpose::Scenario).unwrap_err();
        assert!(err.0.contains("`profile`"), "{err}");
        assert!(parse_and_validate(None, &Overrides::default(), None, Purpose::Inspect).is_ok());
    }

    #[test]
    fn seed_priority() {
        let f = write(r#"{"seed": 3, "profile": "device-a"}"#);
        let flag = Overrides {
            seed: Some(7),
            ..Overrides::default()
        };
        let c = parse_and_validate(Some(f.path()), &flag, Some("11"), Purpose::Scenario).unwrap();
        assert_eq!(c.seed, 7);
        let c = parse_and_validate(Some(f.path()), &Overrides::default(), Some("11"), Purpose::Scenario).unwrap();
        assert_eq!(c.seed, 3);
        let c = parse_and_validate(None, &Overrides::default(), Some("11"), Purpose::Inspect).unwrap();
        assert_eq!(c.seed, 11);
        assert!(parse_and_validate(None, &Overrides::default(), Some("x"), Purpose::Inspect).is_err());
    }

    #[test]
    fn resolved_config_round_trips() {
        let f = write(r#"{"scenario": "C3_4", "profile": "device-b", "mitigator": "qlear",
                         "dataset": {"kind": "classification4", "n_samples": 60}}"#);
        let c = parse_and_validate(Some(f.path()), &Overrides::default(), None, Purpose::Scenario).unwrap();
        assert_eq!(c.uq, Some(UqSettings::bootstrap()));
        let echoed = write(&c.to_json());
        let again = parse_and_validate(Some(echoed.path()), &Overrides::default(), None, Purpose::Scenario).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn constraint_violations_name_fields() {
        for (text, field) in [
            (r#"{"scenario": "C2_1", "profile": "device-a"}"#, "`mitigator`"),
            (r#"{"profile": "nope.json"}"#, "`profile`"),
            (r#"{"profile": "device-a", "dataset": {"n_samples": 5}}"#, "`dataset.n_samples`"),
            (r#"{"profile": "device-a", "repeats": 0}"#, "`repeats`"),
            (r#"{"bogus": 1}"#, "`config`"),
        ] {
            let f = write(text);
            let err = parse_and_validate(Some(f.path()), &Overrides::default(), None, Purpose::Scenario).unwrap_err();
            assert!(err.0.contains(field), "{text}: {err}");
        }
    }
}
