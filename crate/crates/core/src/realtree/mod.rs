//! Finite real trees with exact edge lengths, subtree representations of distances and
//! reconstruction of trees from additive metrics.

mod generate;
mod reconstruct;
mod representation;
mod subtree;
mod tree;

use thiserror::Error;

use crate::distance::{Certificate, DistanceError};
use crate::tightspan::TightSpanError;

pub use generate::{anchor_leaves, random_subtree_distance, random_tree};
pub use reconstruct::additive_tree_reconstruction;
pub use representation::{
    build_subtree_representation, build_with_gates, verify_subtree_representation, GateSkeleton, SubtreeRepresentation,
};
pub use subtree::{hull_length, hull_length_of_points, hull_subtree, subtree_distance, total_length, Segment, Subtree};
pub use tree::{Edge, EdgeId, TreePoint, VertexId, WeightedTree};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TreeError {
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("unknown anchor {0:?}")]
    UnknownAnchor(String),
    #[error("invalid subtree: {0}")]
    InvalidSubtree(String),
    #[error("labels of the representation and the distance differ")]
    LabelMismatch,
    #[error("metric is not additive: {0}")]
    NotAdditive(Certificate),
    #[error("distance violates the extended four-point condition: {0}")]
    NotExtFourPoint(Certificate),
    #[error("constructed representation failed verification: {0}")]
    VerificationFailed(Certificate),
    #[error(transparent)]
    TightSpan(Box<TightSpanError>),
    #[error(transparent)]
    Distance(#[from] DistanceError),
}

impl From<TightSpanError> for TreeError {
    fn from(e: TightSpanError) -> Self {
        TreeError::TightSpan(Box::new(e))
    }
}
