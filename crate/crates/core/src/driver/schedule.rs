//! Candidate ordering.
//!
//! Candidates are ordered by the rank of their location in the suspicious
//! list, the traversal position of the matched node, the change action
//! (Update, Insert, Delete, Move), the pattern's catalog position, the donor
//! distance (candidates without a donor first), the donor's source position
//! and finally generation order.

use serde::{Deserialize, Serialize};

use crate::ast::Action;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ScheduleKey {
    pub location_rank: usize,
    pub node_order: usize,
    pub action: Action,
    pub pattern_index: usize,
    pub donor_distance: Option<usize>,
    pub donor_pos: usize,
    pub gen_index: usize,
}

/// Stable sort by schedule key.
pub fn schedule<T>(items: &mut [T], key: impl Fn(&T) -> ScheduleKey) {
    items.sort_by_key(key);
}
