//! Task-space diversity: syntax trees, edit distances and 2D embeddings.

mod layout;
mod ted;
mod tree;

pub use layout::{fr_layout, pairwise_matrix, upper_pairs, DistanceMatrix, Layout, DEFAULT_ITERATIONS};
pub use ted::{discount, tree_edit_distance, CostModel};
pub use tree::{task_to_tree, NodeKind, SyntaxNode, VERBS};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum DiversityError {
    #[error("cost model has no weight for {0:?}")]
    MissingWeight(NodeKind),
    #[error("weight for {0:?} must be positive and finite, got {1}")]
    Weight(NodeKind, f64),
    #[error("update base must lie in (0, 2], got {0}")]
    UpdateBase(f64),
    #[error("need at least two tasks, got {0}")]
    TooFew(usize),
    #[error("{0} tasks need n(n-1)/2 upper entries, got {1}")]
    Shape(usize, usize),
    #[error("distances must be finite and non-negative, got {0}")]
    Entry(f64),
}
