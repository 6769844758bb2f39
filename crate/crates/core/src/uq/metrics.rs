use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Empirical quantile with linear interpolation between order statistics at
/// position `(n − 1)·q`.
pub fn quantile(samples: &[f64], q: f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    quantile_sorted(&sorted, q)
}

pub(crate) fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Central `1 − alpha` interval from the `alpha/2` and `1 − alpha/2` quantiles.
pub fn prediction_interval(samples: &[f64], alpha: f64) -> Result<(f64, f64)> {
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Validation(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok((quantile_sorted(&sorted, alpha / 2.0), quantile_sorted(&sorted, 1.0 - alpha / 2.0)))
}

pub fn covers((lo, hi): (f64, f64), y: f64) -> bool {
    lo <= y && y <= hi
}

/// CRPS of the empirical CDF of `samples` at outcome `y`, via
/// `mean|xᵢ − y| − ½·mean|xᵢ − xⱼ|`. The pair term uses the sorted-order
/// identity `Σᵢⱼ|xᵢ − xⱼ| = 2·Σₖ (2k − n + 1)·x₍ₖ₎`.
///
/// Panics on an empty sample set.
pub fn crps(samples: &[f64], y: f64) -> f64 {
    assert!(!samples.is_empty(), "crps needs at least one sample");
    let n = samples.len() as f64;
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let spread: f64 = sorted.iter().map(|x| (x - y).abs()).sum::<f64>() / n;
    let pairs: f64 = sorted
        .iter()
        .enumerate()
        .map(|(k, x)| (2.0 * k as f64 - n + 1.0) * x)
        .sum::<f64>()
        * 2.0
        / (n * n);
    (spread - 0.5 * pairs).max(0.0)
}

/// Pinball loss at quantile level `tau`.
pub fn check_score(y: f64, q: f64, tau: f64) -> f64 {
    if y >= q {
        tau * (y - q)
    } else {
        (1.0 - tau) * (q - y)
    }
}

/// Quantile levels averaged by [`mean_check_score`].
pub const CHECK_LEVELS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Check score averaged over [`CHECK_LEVELS`], each quantile read from `samples`.
pub fn mean_check_score(samples: &[f64], y: f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    CHECK_LEVELS
        .iter()
        .map(|&tau| check_score(y, quantile_sorted(&sorted, tau), tau))
        .sum::<f64>()
        / CHECK_LEVELS.len() as f64
}

pub fn interval_score(y: f64, lo: f64, hi: f64, alpha: f64) -> Result<f64> {
    if lo > hi {
        return Err(Error::InvalidInterval { lo, hi });
    }
    let mut score = hi - lo;
    if y < lo {
        score += 2.0 / alpha * (lo - y);
    }
    if y > hi {
        score += 2.0 / alpha * (y - hi);
    }
    Ok(score)
}

fn check_pairs(probs: &[f64], labels: &[u8]) -> Result<()> {
    if probs.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: probs.len(),
            right: labels.len(),
        });
    }
    if probs.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

/// Mean squared difference between positive-class probabilities and labels.
pub fn brier(probs: &[f64], labels: &[u8]) -> Result<f64> {
    check_pairs(probs, labels)?;
    Ok(probs
        .iter()
        .zip(labels)
        .map(|(p, &y)| (p - f64::from(y)).powi(2))
        .sum::<f64>()
        / probs.len() as f64)
}

pub const LOG_LOSS_EPSILON: f64 = 1e-15;

pub fn log_loss(probs: &[f64], labels: &[u8]) -> Result<f64> {
    log_loss_eps(probs, labels, LOG_LOSS_EPSILON)
}

pub fn log_loss_eps(probs: &[f64], labels: &[u8], epsilon: f64) -> Result<f64> {
    check_pairs(probs, labels)?;
    Ok(probs
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            let p = p.clamp(epsilon, 1.0 - epsilon);
            if y == 1 {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum::<f64>()
        / probs.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityBin {
    pub lo: f64,
    pub hi: f64,
    /// Mean predicted positive-class probability; `None` for an empty bin.
    pub mean_confidence: Option<f64>,
    /// Fraction of positive labels; `None` for an empty bin.
    pub observed_frequency: Option<f64>,
    pub count: usize,
}

impl ReliabilityBin {
    /// Predicted confidence exceeds the observed frequency.
    pub fn overconfident(&self) -> bool {
        matches!((self.mean_confidence, self.observed_frequency), (Some(c), Some(f)) if c > f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityDiagram {
    pub bins: Vec<ReliabilityBin>,
}

/// Equal-width bins over `[0, 1]`; each bin is `[lo, hi)` except the last,
/// which also holds `1.0`.
pub fn reliability_diagram(probs: &[f64], labels: &[u8], n_bins: usize) -> Result<ReliabilityDiagram> {
    check_pairs(probs, labels)?;
    if n_bins == 0 {
        return Err(Error::Validation("n_bins must be positive".into()));
    }
    if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Validation(format!("probability {p} outside [0, 1]")));
    }
    let mut sums = vec![(0.0, 0.0, 0usize); n_bins];
    for (&p, &y) in probs.iter().zip(labels) {
        let b = ((p * n_bins as f64).floor() as usize).min(n_bins - 1);
        sums[b].0 += p;
        sums[b].1 += f64::from(y);
        sums[b].2 += 1;
    }
    let bins = sums
        .into_iter()
        .enumerate()
        .map(|(b, (conf, pos, count))| {
            let n = count as f64;
            ReliabilityBin {
                lo: b as f64 / n_bins as f64,
                hi: (b + 1) as f64 / n_bins as f64,
                mean_confidence: (count > 0).then(|| conf / n),
                observed_frequency: (count > 0).then(|| pos / n),
                count,
            }
        })
        .collect();
    Ok(ReliabilityDiagram { bins })
}

impl ReliabilityDiagram {
    /// Mean |confidence − frequency| weighted by bin count.
    pub fn calibration_error(&self) -> f64 {
        let total: usize = self.bins.iter().map(|b| b.count).sum();
        self.bins
            .iter()
            .filter_map(|b| Some((b.mean_confidence? - b.observed_frequency?).abs() * b.count as f64))
            .sum::<f64>()
            / total.max(1) as f64
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["bin_lo", "bin_hi", "mean_confidence", "observed_frequency", "count"])?;
        let opt = |v: Option<f64>| v.map_or_else(String::new, |v| v.to_string());
        for b in &self.bins {
            w.write_record([
                b.lo.to_string(),
                b.hi.to_string(),
                opt(b.mean_confidence),
                opt(b.observed_frequency),
                b.count.to_string(),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?)
            .expect("csv output is utf-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    /// Exact integral of (F(z) − 1{y ≤ z})² for the empirical CDF: the
    /// integrand is piecewise constant between consecutive breakpoints.
    fn crps_by_integration(samples: &[f64], y: f64) -> f64 {
        let mut points: Vec<f64> = samples.to_vec();
        points.push(y);
        points.sort_by(f64::total_cmp);
        let n = samples.len() as f64;
        points
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let f = samples.iter().filter(|&&x| x <= mid).count() as f64 / n;
                let step = if y <= mid { 1.0 } else { 0.0 };
                (f - step).powi(2) * (w[1] - w[0])
            })
            .sum()
    }

    #[test]
    fn interval_examples() {
        assert_eq!(prediction_interval(&[5.0; 10], 0.05).unwrap(), (5.0, 5.0));
        let s: Vec<f64> = (1..=100).map(f64::from).collect();
        let (lo, hi) = prediction_interval(&s, 0.05).unwrap();
        assert!((lo - 3.475).abs() < 1e-12 && (hi - 97.525).abs() < 1e-12);
        assert!(covers((8.5, 11.2), 10.7));
        assert!(matches!(prediction_interval(&[1.0], 0.05), Err(Error::InsufficientSamples { .. })));
    }

    #[test]
    fn crps_examples() {
        assert_eq!(crps(&[3.0, 3.0, 3.0], 3.0), 0.0);
        assert!((crps(&[0.0, 2.0], 1.0) - 0.5).abs() < 1e-15);
        assert!((crps_by_integration(&[0.0, 2.0], 1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn crps_matches_integration_oracle() {
        let mut rng = rng_from_seed(8);
        for _ in 0..50 {
            let n = rng.random_range(1..=20);
            let s: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let y = rng.random_range(-4.0..4.0);
            assert!((crps(&s, y) - crps_by_integration(&s, y)).abs() < 1e-9);
        }
    }

    #[test]
    fn check_score_examples() {
        assert_eq!(check_score(4.0, 4.0, 0.3), 0.0);
        assert!((check_score(3.0, 7.0, 0.5) - 2.0).abs() < 1e-15);
        assert!((check_score(10.0, 8.0, 0.9) - 1.8).abs() < 1e-12);
    }

    #[test]
    fn interval_score_examples() {
        assert!((interval_score(13.0, 8.0, 12.0, 0.05).unwrap() - 44.0).abs() < 1e-9);
        assert!((interval_score(7.0, 8.0, 12.0, 0.05).unwrap() - 44.0).abs() < 1e-9);
        assert_eq!(interval_score(10.0, 8.0, 12.0, 0.05).unwrap(), 4.0);
        assert!(matches!(interval_score(0.0, 2.0, 1.0, 0.1), Err(Error::InvalidInterval { .. })));
    }

    #[test]
    fn brier_and_log_loss_examples() {
        assert!((brier(&[0.8], &[1]).unwrap() - 0.04).abs() < 1e-12);
        assert_eq!(brier(&[1.0, 0.0], &[1, 0]).unwrap(), 0.0);
        assert!((brier(&[0.5; 4], &[0, 1, 1, 0]).unwrap() - 0.25).abs() < 1e-15);
        assert!((log_loss(&[0.8], &[1]).unwrap() - 0.2231435513).abs() < 1e-9);
        assert!((log_loss(&[0.01], &[1]).unwrap() - 4.605170186).abs() < 1e-8);
        let saturated = log_loss(&[1.0], &[1]).unwrap();
        assert!(saturated.is_finite() && saturated < 2e-15);
        assert!(log_loss(&[0.0], &[1]).unwrap().is_finite());
        assert!(matches!(brier(&[0.1], &[1, 0]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn reliability_top_bin_and_overconfidence() {
        let d = reliability_diagram(&[1.0; 5], &[1; 5], 10).unwrap();
        let top = d.bins.last().unwrap();
        assert_eq!((top.mean_confidence, top.observed_frequency, top.count), (Some(1.0), Some(1.0), 5));
        assert!(d.bins[..9].iter().all(|b| b.count == 0 && b.mean_confidence.is_none()));

        // 4 predictions in [0.8, 0.9) averaging 0.85, 3 of them positive
        let d = reliability_diagram(&[0.82, 0.84, 0.86, 0.88], &[1, 1, 0, 1], 10).unwrap();
        let bin = &d.bins[8];
        assert!((bin.mean_confidence.unwrap() - 0.85).abs() < 1e-12);
        assert_eq!(bin.observed_frequency, Some(0.75));
        assert!(bin.overconfident());
    }

    #[test]
    fn reliability_counts_by_hand() {
        // 100 points: bin b gets 10 points at probability b/10 + 0.05 with b positives
        let mut probs = Vec::new();
        let mut labels = Vec::new();
        for b in 0..10 {
            for k in 0..10 {
                probs.push(b as f64 / 10.0 + 0.05);
                labels.push(u8::from(k < b));
            }
        }
        let d = reliability_diagram(&probs, &labels, 10).unwrap();
        assert_eq!(d.bins.iter().map(|b| b.count).sum::<usize>(), 100);
        for (b, bin) in d.bins.iter().enumerate() {
            assert_eq!(bin.count, 10);
            assert!((bin.observed_frequency.unwrap() - b as f64 / 10.0).abs() < 1e-12);
            assert!((bin.mean_confidence.unwrap() - (b as f64 / 10.0 + 0.05)).abs() < 1e-12);
        }
        assert!(d.to_csv().unwrap().lines().count() == 11);
    }
}
