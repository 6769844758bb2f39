//! Experiment harness: synthetic datasets, the scenario matrix, statistics
//! and report files.
//!
//! A scenario trains a QELM with features from one backend and tests it with
//! features from another (ideal, noisy or mitigated). Each repeat is paired
//! with an ideal/ideal repeat on the same seeds, and the report compares the
//! two sets of percentage changes with a Mann-Whitney U test and Â12.

mod datasets;
mod report;
mod scenario;
mod stats;

pub use datasets::{generate_dataset, DatasetKind, MIN_SAMPLES, TRAIN_FRACTION};
pub use report::{emit_report, load_report, metrics_csv, results_json, METRICS_COLUMNS};
pub use scenario::{
    run_scenario, run_uq, scenario_backends, BackendKind, ScenarioBackends, DatasetSummary, MitigationInfo, MitigatorKind, RepeatRecord, RepeatStatus,
    ScenarioConfig, ScenarioId, ScenarioReport, Statistics, UqReport, UqSettings, UqSummary, DEFAULT_REPEATS,
    DEFAULT_SHOTS, QLEAR_FRONT_CIRCUITS, QLEAR_RANDOM_CIRCUITS, REPORT_SCHEMA_VERSION,
};
pub use stats::{
    a12, mann_whitney_exact, mann_whitney_normal, mann_whitney_u, percent_change, EffectThresholds, MannWhitney,
    MetricKind, MwMethod, EXACT_LIMIT,
};
