//! Tabular datasets: a real feature matrix plus one target column.
//!
//! On disk a dataset is a CSV file with a header row; the final column is the
//! target. Classification targets are the labels `0` and `1`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Regression,
    Classification,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub features: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
    pub task: Task,
}

impl Dataset {
    pub fn new(features: Vec<Vec<f64>>, targets: Vec<f64>, task: Task) -> Result<Self> {
        let d = features.first().map_or(0, Vec::len);
        let names = (0..d).map(|i| format!("x{i}")).collect();
        Self::with_names(names, features, targets, task)
    }

    pub fn with_names(
        feature_names: Vec<String>,
        features: Vec<Vec<f64>>,
        targets: Vec<f64>,
        task: Task,
    ) -> Result<Self> {
        if features.len() != targets.len() {
            return Err(Error::LengthMismatch {
                left: features.len(),
                right: targets.len(),
            });
        }
        if let Some(row) = features.iter().find(|r| r.len() != feature_names.len()) {
            return Err(Error::DimensionMismatch {
                expected: feature_names.len(),
                got: row.len(),
            });
        }
        if features.iter().flatten().chain(&targets).any(|v| !v.is_finite()) {
            return Err(Error::Validation("dataset contains non-finite values".into()));
        }
        if task == Task::Classification && targets.iter().any(|&t| t != 0.0 && t != 1.0) {
            return Err(Error::Validation("classification labels must be 0 or 1".into()));
        }
        Ok(Self {
            feature_names,
            features,
            targets,
            task,
        })
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Class labels; meaningful for classification datasets only.
    pub fn labels(&self) -> Vec<usize> {
        self.targets.iter().map(|&t| t as usize).collect()
    }

    /// Per-column `(min, max)`.
    pub fn feature_ranges(&self) -> Vec<(f64, f64)> {
        (0..self.n_features())
            .map(|c| {
                self.features.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                    (lo.min(r[c]), hi.max(r[c]))
                })
            })
            .collect()
    }

    /// Rows at `indices`, in that order (repeats allowed).
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            feature_names: self.feature_names.clone(),
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            targets: indices.iter().map(|&i| self.targets[i]).collect(),
            task: self.task,
        }
    }

    pub fn from_csv(path: impl AsRef<Path>, task: Task) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path)?;
        let header = reader.headers()?.clone();
        if header.len() < 2 {
            return Err(Error::Parse("dataset needs at least one feature and a target column".into()));
        }
        let names: Vec<String> = header.iter().take(header.len() - 1).map(str::to_owned).collect();
        let (mut features, mut targets) = (Vec::new(), Vec::new());
        for (line, record) in reader.records().enumerate() {
            let record = record?;
            let values = record
                .iter()
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("row {}: {e}", line + 1)))?;
            let (target, row) = values.split_last().ok_or_else(|| Error::Parse("empty row".into()))?;
            features.push(row.to_vec());
            targets.push(*target);
        }
        Self::with_names(names, features, targets, task)
    }

    pub fn to_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut writer = csv::Writer::from_path(path)?;
        let mut header = self.feature_names.clone();
        header.push("target".into());
        writer.write_record(&header)?;
        for (row, t) in self.features.iter().zip(&self.targets) {
            writer.write_record(row.iter().chain(std::iter::once(t)).map(f64::to_string))?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// A dataset already divided into training and test rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub train: Dataset,
    pub test: Dataset,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let ds = Dataset::new(
            vec![vec![0.5, -1.25], vec![3.0, 1e-3]],
            vec![1.0, 0.0],
            Task::Classification,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        ds.to_csv(&path).unwrap();
        assert_eq!(Dataset::from_csv(&path, Task::Classification).unwrap(), ds);
    }

    #[test]
    fn rejects_bad_labels_and_ragged_rows() {
        assert!(Dataset::new(vec![vec![0.0]], vec![2.0], Task::Classification).is_err());
        assert!(matches!(
            Dataset::new(vec![vec![0.0], vec![1.0, 2.0]], vec![0.0, 1.0], Task::Regression),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn ranges_and_subset() {
        let ds = Dataset::new(vec![vec![1.0], vec![-2.0], vec![4.0]], vec![0.0, 1.0, 2.0], Task::Regression)
            .unwrap();
        assert_eq!(ds.feature_ranges(), vec![(-2.0, 4.0)]);
        assert_eq!(ds.subset(&[2, 2]).targets, vec![2.0, 2.0]);
    }
}
