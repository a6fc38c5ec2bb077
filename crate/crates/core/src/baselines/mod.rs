//! Row-wise comparison classifiers. Both ignore graph structure and consume
//! the same standardized feature rows as the GNN.

mod gbdt;
mod knn;

pub use gbdt::{best_split, softmax_log_loss, GbdtConfig, GbdtModel, SplitCandidate, TreeNode};
pub use knn::{KnnModel, DEFAULT_K};
