//! Uncertainty quantification: prediction distributions from bootstrap
//! resampling or ensembles, and the interval, scoring-rule, and calibration
//! metrics computed from them.
//!
//! Classification metrics work on the positive-class probability.

mod distribution;
mod metrics;

pub use distribution::{
    bootstrap_distribution, bootstrap_from_features, ensemble_distribution, ensemble_with_seeds,
    summarize_classification, summarize_regression, ClassificationUq, Extraction, IntervalRow,
    PredictionDistribution, RegressionUq, UqSource,
};
pub use metrics::{
    brier, check_score, covers, crps, interval_score, log_loss, log_loss_eps, mean_check_score,
    prediction_interval, quantile, reliability_diagram, ReliabilityBin, ReliabilityDiagram,
    CHECK_LEVELS, LOG_LOSS_EPSILON,
};
