use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rng::{derive_seed, rng_from_seed};

use super::tree::{DecisionTree, TreeParams};

/// Bootstrap-aggregated regression trees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaggedTrees {
    pub trees: Vec<DecisionTree>,
}

impl BaggedTrees {
    pub fn fit(
        x: &[Vec<f64>],
        y: &[f64],
        n_trees: usize,
        params: &TreeParams,
        seed: u64,
    ) -> Result<Self> {
        let n = x.len();
        let trees = (0..n_trees.max(1))
            .map(|t| {
                let mut rng = rng_from_seed(derive_seed(seed, t as u64));
                let (bx, by): (Vec<Vec<f64>>, Vec<f64>) = (0..n)
                    .map(|_| {
                        let i = rng.random_range(0..n);
                        (x[i].clone(), y[i])
                    })
                    .unzip();
                DecisionTree::fit_regressor(&bx, &by, params)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { trees })
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict_value(x)).sum::<f64>() / self.trees.len() as f64
    }
}
