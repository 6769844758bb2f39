use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::linear::{check_design, Standardizer};

const DEGENERATE_CLAMP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    pub learning_rate: f64,
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            max_iterations: 500,
            gradient_tolerance: 1e-6,
        }
    }
}

/// Binary logistic regression trained by full-batch gradient descent on the
/// mean log loss. Weights are stored in raw-feature space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticReadout {
    pub weights: Vec<f64>,
    pub intercept: f64,
    /// Set when every training label was identical; the model then predicts
    /// a constant probability.
    pub degenerate: bool,
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl LogisticReadout {
    /// `y` holds labels in `{0, 1}`.
    pub fn fit(x: &[Vec<f64>], y: &[f64], params: &LogisticParams) -> Result<Self> {
        let d = check_design(x, y.len())?;
        let positives = y.iter().filter(|&&v| v >= 0.5).count();
        if positives == 0 || positives == y.len() {
            let p = if positives == 0 {
                DEGENERATE_CLAMP
            } else {
                1.0 - DEGENERATE_CLAMP
            };
            return Ok(Self {
                weights: vec![0.0; d],
                intercept: (p / (1.0 - p)).ln(),
                degenerate: true,
            });
        }
        let std = Standardizer::fit(x);
        let z = std.transform(x);
        let n = y.len() as f64;
        let mut w = vec![0.0; d];
        let mut b = 0.0;
        let mut grad_w = vec![0.0; d];
        for _ in 0..params.max_iterations {
            grad_w.iter_mut().for_each(|g| *g = 0.0);
            let mut grad_b = 0.0;
            for (r, &target) in y.iter().enumerate() {
                let row = z.row(r);
                let logit = b + row.iter().zip(&w).map(|(a, c)| a * c).sum::<f64>();
                let err = sigmoid(logit) - target;
                grad_b += err / n;
                for (g, a) in grad_w.iter_mut().zip(row.iter()) {
                    *g += err * a / n;
                }
            }
            let norm = (grad_b * grad_b + grad_w.iter().map(|g| g * g).sum::<f64>()).sqrt();
            if norm < params.gradient_tolerance {
                break;
            }
            b -= params.learning_rate * grad_b;
            for (wi, g) in w.iter_mut().zip(&grad_w) {
                *wi -= params.learning_rate * g;
            }
        }
        let (weights, intercept) = std.unscale(&w, b);
        Ok(Self {
            weights,
            intercept,
            degenerate: false,
        })
    }

    /// Positive-class probability.
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        sigmoid(self.intercept + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_set_fits_perfectly() {
        let x: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let t = i as f64 / 40.0;
                vec![t, (i % 7) as f64 / 7.0]
            })
            .collect();
        let y: Vec<f64> = x.iter().map(|r| if r[0] > 0.5 { 1.0 } else { 0.0 }).collect();
        let m = LogisticReadout::fit(&x, &y, &LogisticParams::default()).unwrap();
        let correct = x
            .iter()
            .zip(&y)
            .filter(|(r, &t)| (m.predict_proba(r) >= 0.5) == (t == 1.0))
            .count();
        assert_eq!(correct, x.len());
        assert!(!m.degenerate);
    }

    #[test]
    fn identical_labels_give_flagged_constant_model() {
        let x: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64]).collect();
        let m = LogisticReadout::fit(&x, &[1.0; 5], &LogisticParams::default()).unwrap();
        assert!(m.degenerate);
        assert!(m.predict_proba(&[100.0]) > 0.99);
        assert_eq!(m.predict_proba(&[0.0]), m.predict_proba(&[3.0]));
    }

    #[test]
    fn sigmoid_is_stable_at_extremes() {
        assert_eq!(sigmoid(800.0), 1.0);
        assert_eq!(sigmoid(-800.0), 0.0);
        assert!((sigmoid(0.0) - 0.5).abs() < 1e-15);
    }
}
