use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column means and scales used to condition the fits; results are always
/// mapped back to raw-feature weights.
pub(crate) struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &[Vec<f64>]) -> Self {
        let n = x.len() as f64;
        let d = x[0].len();
        let mut mean = vec![0.0; d];
        for row in x {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v / n;
            }
        }
        let mut scale = vec![0.0; d];
        for row in x {
            for ((s, v), m) in scale.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m) / n;
            }
        }
        for s in &mut scale {
            *s = if *s > 1e-24 { s.sqrt() } else { 1.0 };
        }
        Self { mean, scale }
    }

    pub fn transform(&self, x: &[Vec<f64>]) -> DMatrix<f64> {
        DMatrix::from_fn(x.len(), self.mean.len(), |r, c| {
            (x[r][c] - self.mean[c]) / self.scale[c]
        })
    }

    /// Map standardized-space weights/intercept back to raw features.
    pub fn unscale(&self, w: &[f64], intercept: f64) -> (Vec<f64>, f64) {
        let raw: Vec<f64> = w.iter().zip(&self.scale).map(|(w, s)| w / s).collect();
        let b = intercept - raw.iter().zip(&self.mean).map(|(w, m)| w * m).sum::<f64>();
        (raw, b)
    }
}

pub(crate) fn check_design(x: &[Vec<f64>], n_targets: usize) -> Result<usize> {
    if x.len() != n_targets {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: n_targets,
        });
    }
    if x.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: x.len(),
        });
    }
    let d = x[0].len();
    if let Some(row) = x.iter().find(|r| r.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: row.len(),
        });
    }
    Ok(d)
}

/// Ridge-regularized least squares `y ≈ w·x + b` (intercept unpenalized).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearReadout {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearReadout {
    pub fn fit(x: &[Vec<f64>], y: &[f64], ridge: f64) -> Result<Self> {
        let d = check_design(x, y.len())?;
        let std = Standardizer::fit(x);
        let z = std.transform(x);
        let y_mean = y.iter().sum::<f64>() / y.len() as f64;
        let yc = DVector::from_iterator(y.len(), y.iter().map(|v| v - y_mean));
        let mut gram = z.transpose() * &z;
        for i in 0..d {
            gram[(i, i)] += ridge;
        }
        let rhs = z.transpose() * yc;
        let w = match gram.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => gram
                .svd(true, true)
                .solve(&rhs, 1e-12)
                .map_err(|e| Error::Validation(format!("normal equations: {e}")))?,
        };
        let (weights, intercept) = std.unscale(w.as_slice(), y_mean);
        Ok(Self { weights, intercept })
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.intercept + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_data_recovers_unit_weight() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 * 0.37 - 2.0]).collect();
        let y: Vec<f64> = x.iter().map(|r| r[0]).collect();
        let m = LinearReadout::fit(&x, &y, 1e-8).unwrap();
        assert!((m.weights[0] - 1.0).abs() < 1e-6);
        assert!(m.intercept.abs() < 1e-6);
    }

    #[test]
    fn recovers_multivariate_plane() {
        let x: Vec<Vec<f64>> = (0..30)
            .map(|i| {
                let t = i as f64;
                vec![(t * 0.7).sin(), (t * 1.3).cos(), t / 30.0]
            })
            .collect();
        let y: Vec<f64> = x.iter().map(|r| 2.0 * r[0] - 3.0 * r[1] + 0.5 * r[2] + 4.0).collect();
        let m = LinearReadout::fit(&x, &y, 1e-10).unwrap();
        for (w, e) in m.weights.iter().zip([2.0, -3.0, 0.5]) {
            assert!((w - e).abs() < 1e-6);
        }
        assert!((m.intercept - 4.0).abs() < 1e-6);
    }

    #[test]
    fn collinear_simplex_features_stay_finite() {
        // probability-like rows summing to one
        let x: Vec<Vec<f64>> = (0..10)
            .map(|i| {
                let a = i as f64 / 10.0;
                vec![a, 1.0 - a]
            })
            .collect();
        let y: Vec<f64> = x.iter().map(|r| 3.0 * r[0]).collect();
        let m = LinearReadout::fit(&x, &y, 1e-8).unwrap();
        for row in &x {
            assert!((m.predict(row) - 3.0 * row[0]).abs() < 1e-6);
        }
    }

    #[test]
    fn constant_rows_predict_target_mean() {
        let x = vec![vec![0.2, 0.8]; 5];
        let y = vec![7.0; 5];
        let m = LinearReadout::fit(&x, &y, 1e-8).unwrap();
        assert!((m.predict(&[0.2, 0.8]) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(
            LinearReadout::fit(&[vec![1.0]], &[1.0], 1e-8),
            Err(Error::InsufficientSamples { .. })
        ));
        assert!(matches!(
            LinearReadout::fit(&[vec![1.0], vec![2.0]], &[1.0], 1e-8),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
