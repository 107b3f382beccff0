//! Language-neutral tree services: node model, edits, distances and
//! normalized comparison.

mod distance;
mod edit;
mod node;
mod normalize;

pub use distance::{ast_distance, ast_distance_with, distances_from, DistanceError, DistanceMetric};
pub use edit::{apply_edits, Action, AstEdit, EditError, Patch};
pub use node::*;
pub use normalize::{normalize, normalize_equal};
