use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Largest pooled sample size tested with the exact null distribution.
pub const EXACT_LIMIT: usize = 16;
const MIN_GROUP: usize = 3;

/// Direction of a scalar performance metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    /// Lower is better (mean squared error).
    Error,
    /// Higher is better, bounded by 1.
    Accuracy,
}

/// Percentage degradation relative to `ideal`: the relative increase of an
/// error metric, or the relative decrease of accuracy. Positive means worse.
pub fn percent_change(ideal: f64, observed: f64, metric: MetricKind) -> Result<f64> {
    if ideal == 0.0 {
        return Err(Error::DivisionByZero(ideal));
    }
    match metric {
        MetricKind::Error if ideal < 0.0 => Err(Error::Validation(format!("error metric {ideal} is negative"))),
        MetricKind::Accuracy if !(ideal > 0.0 && ideal <= 1.0) => {
            Err(Error::Validation(format!("accuracy {ideal} is outside (0, 1]")))
        }
        MetricKind::Error => Ok(100.0 * (observed - ideal) / ideal),
        MetricKind::Accuracy => Ok(100.0 * (ideal - observed) / ideal),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MwMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MannWhitney {
    /// `U` of the first sample: pairs where it is larger, ties counting half.
    pub u: f64,
    pub p_value: f64,
    pub method: MwMethod,
}

/// Midranks (1-based) of the pooled sample, plus the tie groups' sizes.
fn midranks(pooled: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut ties = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && pooled[order[end]] == pooled[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        ties.push(end - start);
        start = end;
    }
    (ranks, ties)
}

fn check_groups(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() < MIN_GROUP || b.len() < MIN_GROUP {
        return Err(Error::TooFewSamples { needed: MIN_GROUP });
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::Validation("Mann-Whitney input contains non-finite values".into()));
    }
    Ok(())
}

fn u_statistic(ranks: &[f64], n1: usize) -> f64 {
    ranks[..n1].iter().sum::<f64>() - (n1 * (n1 + 1)) as f64 / 2.0
}

/// Two-sided Mann-Whitney U test. Uses the exact permutation distribution
/// when the pooled size is at most [`EXACT_LIMIT`], otherwise the normal
/// approximation.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<MannWhitney> {
    if a.len() + b.len() <= EXACT_LIMIT {
        mann_whitney_exact(a, b)
    } else {
        mann_whitney_normal(a, b)
    }
}

/// Exact test: every assignment of the pooled midranks to the first group is
/// enumerated, so ties are handled without approximation. The cost grows as
/// `C(n₁+n₂, n₁)`.
pub fn mann_whitney_exact(a: &[f64], b: &[f64]) -> Result<MannWhitney> {
    check_groups(a, b)?;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, _) = midranks(&pooled);
    let (n1, n) = (a.len(), pooled.len());
    let u_obs = u_statistic(&ranks, n1);
    let mu = (n1 * (n - n1)) as f64 / 2.0;
    let threshold = (u_obs - mu).abs() - 1e-9;
    let offset = (n1 * (n1 + 1)) as f64 / 2.0;

    let (mut extreme, mut total) = (0u64, 0u64);
    let mut chosen: Vec<usize> = (0..n1).collect();
    loop {
        let u = chosen.iter().map(|&i| ranks[i]).sum::<f64>() - offset;
        total += 1;
        if (u - mu).abs() >= threshold {
            extreme += 1;
        }
        // next combination in lexicographic order
        let Some(pos) = (0..n1).rev().find(|&k| chosen[k] < n - n1 + k) else {
            break;
        };
        chosen[pos] += 1;
        for k in pos + 1..n1 {
            chosen[k] = chosen[k - 1] + 1;
        }
    }
    Ok(MannWhitney {
        u: u_obs,
        p_value: extreme as f64 / total as f64,
        method: MwMethod::Exact,
    })
}

/// Normal approximation with tie-corrected variance and a 0.5 continuity
/// correction.
pub fn mann_whitney_normal(a: &[f64], b: &[f64]) -> Result<MannWhitney> {
    check_groups(a, b)?;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let n = n1 + n2;
    let u = u_statistic(&ranks, a.len());
    let mu = n1 * n2 / 2.0;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (n * (n - 1.0));
    let var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term);
    let p_value = if var <= 0.0 {
        1.0
    } else {
        let z = ((u - mu).abs() - 0.5).max(0.0) / var.sqrt();
        let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
        (2.0 * (1.0 - std_normal.cdf(z))).min(1.0)
    };
    Ok(MannWhitney {
        u,
        p_value,
        method: MwMethod::Normal,
    })
}

/// Vargha-Delaney Â12: probability that a draw from `a` exceeds one from
/// `b`, ties counting half.
pub fn a12(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut score = 0.0;
    for x in a {
        for y in b {
            if x > y {
                score += 1.0;
            } else if x == y {
                score += 0.5;
            }
        }
    }
    Ok(score / (a.len() * b.len()) as f64)
}

/// User-supplied cut points on `max(Â12, 1 − Â12)` for labelling effect
/// sizes; values below `small` are negligible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectThresholds {
    pub small: f64,
    pub medium: f64,
    pub large: f64,
}

impl EffectThresholds {
    pub fn validate(&self) -> Result<()> {
        let ordered = 0.5 <= self.small && self.small <= self.medium && self.medium <= self.large && self.large <= 1.0;
        if ordered {
            Ok(())
        } else {
            Err(Error::Validation(
                "effect thresholds must satisfy 0.5 <= small <= medium <= large <= 1".into(),
            ))
        }
    }

    pub fn label(&self, a12: f64) -> &'static str {
        let magnitude = a12.max(1.0 - a12);
        if magnitude >= self.large {
            "large"
        } else if magnitude >= self.medium {
            "medium"
        } else if magnitude >= self.small {
            "small"
        } else {
            "negligible"
        }
    }
}
