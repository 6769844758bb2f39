//! Greedy CART trees: Gini classification and squared-error regression.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::linear::check_design;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_samples_split: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: 5,
            min_samples_split: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    /// Class fractions for classifiers, `[mean]` for regressors.
    Leaf { value: Vec<f64> },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
    pub n_features: usize,
}

#[derive(Clone, Copy)]
enum Target<'a> {
    Classes { labels: &'a [usize], n_classes: usize },
    Values(&'a [f64]),
}

/// Best split found at a node: weighted child impurity (sum over children of
/// `n_child * impurity_child`), feature, threshold.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SplitChoice {
    pub cost: f64,
    pub feature: usize,
    pub threshold: f64,
}

pub(crate) fn gini(counts: &[f64], total: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    1.0 - counts.iter().map(|c| (c / total) * (c / total)).sum::<f64>()
}

impl DecisionTree {
    pub fn fit_classifier(
        x: &[Vec<f64>],
        labels: &[usize],
        n_classes: usize,
        params: &TreeParams,
    ) -> Result<Self> {
        let d = check_fit(x, labels.len())?;
        if let Some(&bad) = labels.iter().find(|&&l| l >= n_classes) {
            return Err(Error::Validation(format!(
                "label {bad} outside 0..{n_classes}"
            )));
        }
        Ok(Self::build(x, Target::Classes { labels, n_classes }, d, params))
    }

    pub fn fit_regressor(x: &[Vec<f64>], y: &[f64], params: &TreeParams) -> Result<Self> {
        let d = check_fit(x, y.len())?;
        Ok(Self::build(x, Target::Values(y), d, params))
    }

    fn build(x: &[Vec<f64>], target: Target<'_>, n_features: usize, params: &TreeParams) -> Self {
        let mut tree = Self {
            nodes: Vec::new(),
            n_features,
        };
        let idx: Vec<usize> = (0..x.len()).collect();
        tree.grow(x, target, idx, 0, params);
        tree
    }

    fn grow(
        &mut self,
        x: &[Vec<f64>],
        target: Target<'_>,
        idx: Vec<usize>,
        depth: usize,
        params: &TreeParams,
    ) -> usize {
        let slot = self.nodes.len();
        self.nodes.push(Node::Leaf {
            value: leaf_value(target, &idx),
        });
        let impure = node_impurity(target, &idx) > 1e-15;
        if depth >= params.max_depth || idx.len() < params.min_samples_split.max(2) || !impure {
            return slot;
        }
        let Some(split) = best_split(x, target, &idx) else {
            return slot;
        };
        let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| x[i][split.feature] <= split.threshold);
        let left = self.grow(x, target, left_idx, depth + 1, params);
        let right = self.grow(x, target, right_idx, depth + 1, params);
        self.nodes[slot] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        slot
    }

    fn leaf(&self, x: &[f64]) -> &[f64] {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    /// Class probability vector (classifiers).
    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        self.leaf(x).to_vec()
    }

    /// Leaf mean (regressors).
    pub fn predict_value(&self, x: &[f64]) -> f64 {
        self.leaf(x)[0]
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Root split, if the tree split at all.
    pub fn root_split(&self) -> Option<(usize, f64)> {
        match self.nodes.first()? {
            Node::Split {
                feature, threshold, ..
            } => Some((*feature, *threshold)),
            Node::Leaf { .. } => None,
        }
    }
}

fn check_fit(x: &[Vec<f64>], n: usize) -> Result<usize> {
    if x.len() == 1 && n == 1 {
        return Ok(x[0].len());
    }
    check_design(x, n)
}

fn leaf_value(target: Target<'_>, idx: &[usize]) -> Vec<f64> {
    match target {
        Target::Classes { labels, n_classes } => {
            let mut counts = vec![0.0; n_classes];
            for &i in idx {
                counts[labels[i]] += 1.0;
            }
            let total = idx.len().max(1) as f64;
            counts.iter().map(|c| c / total).collect()
        }
        Target::Values(y) => {
            let mean = idx.iter().map(|&i| y[i]).sum::<f64>() / idx.len().max(1) as f64;
            vec![mean]
        }
    }
}

fn node_impurity(target: Target<'_>, idx: &[usize]) -> f64 {
    match target {
        Target::Classes { labels, n_classes } => {
            let mut counts = vec![0.0; n_classes];
            for &i in idx {
                counts[labels[i]] += 1.0;
            }
            gini(&counts, idx.len() as f64)
        }
        Target::Values(y) => {
            let n = idx.len() as f64;
            let mean = idx.iter().map(|&i| y[i]).sum::<f64>() / n;
            idx.iter().map(|&i| (y[i] - mean).powi(2)).sum::<f64>() / n
        }
    }
}

/// Exhaustive sweep over features and midpoints between distinct sorted
/// values. Ties keep the earliest (feature, threshold).
fn best_split(x: &[Vec<f64>], target: Target<'_>, idx: &[usize]) -> Option<SplitChoice> {
    let n_features = x[idx[0]].len();
    let mut best: Option<SplitChoice> = None;
    let mut order = idx.to_vec();
    for f in 0..n_features {
        order.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(a.cmp(&b)));
        let candidate = match target {
            Target::Classes { labels, n_classes } => sweep_gini(x, f, &order, labels, n_classes),
            Target::Values(y) => sweep_mse(x, f, &order, y),
        };
        if let Some(c) = candidate {
            if best.map_or(true, |b| c.cost < b.cost - 1e-12) {
                best = Some(c);
            }
        }
    }
    best
}

fn sweep_gini(
    x: &[Vec<f64>],
    f: usize,
    order: &[usize],
    labels: &[usize],
    n_classes: usize,
) -> Option<SplitChoice> {
    let n = order.len();
    let mut right = vec![0.0; n_classes];
    for &i in order {
        right[labels[i]] += 1.0;
    }
    let mut left = vec![0.0; n_classes];
    let mut best: Option<SplitChoice> = None;
    for k in 0..n - 1 {
        let i = order[k];
        left[labels[i]] += 1.0;
        right[labels[i]] -= 1.0;
        let (v, next) = (x[i][f], x[order[k + 1]][f]);
        if next <= v {
            continue;
        }
        let (nl, nr) = ((k + 1) as f64, (n - k - 1) as f64);
        let cost = nl * gini(&left, nl) + nr * gini(&right, nr);
        if best.map_or(true, |b| cost < b.cost - 1e-12) {
            best = Some(SplitChoice {
                cost,
                feature: f,
                threshold: 0.5 * (v + next),
            });
        }
    }
    best
}

fn sweep_mse(x: &[Vec<f64>], f: usize, order: &[usize], y: &[f64]) -> Option<SplitChoice> {
    let n = order.len();
    let (mut sum_r, mut sq_r) = (0.0, 0.0);
    for &i in order {
        sum_r += y[i];
        sq_r += y[i] * y[i];
    }
    let (mut sum_l, mut sq_l) = (0.0, 0.0);
    let mut best: Option<SplitChoice> = None;
    for k in 0..n - 1 {
        let i = order[k];
        sum_l += y[i];
        sq_l += y[i] * y[i];
        sum_r -= y[i];
        sq_r -= y[i] * y[i];
        let (v, next) = (x[i][f], x[order[k + 1]][f]);
        if next <= v {
            continue;
        }
        let (nl, nr) = ((k + 1) as f64, (n - k - 1) as f64);
        // n * variance = Σy² − (Σy)²/n
        let cost = (sq_l - sum_l * sum_l / nl).max(0.0) + (sq_r - sum_r * sum_r / nr).max(0.0);
        if best.map_or(true, |b| cost < b.cost - 1e-12) {
            best = Some(SplitChoice {
                cost,
                feature: f,
                threshold: 0.5 * (v + next),
            });
        }
    }
    best
}
