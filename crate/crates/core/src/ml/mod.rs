//! Readout and corrector learners: ridge regression, logistic regression,
//! CART trees, and bagged regression trees.

mod forest;
mod linear;
mod logistic;
mod tree;

pub use forest::BaggedTrees;
pub use linear::LinearReadout;
pub use logistic::{LogisticParams, LogisticReadout};
pub use tree::{DecisionTree, Node, TreeParams};
