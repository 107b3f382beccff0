//! Node distances within one tree, used to rank donor code.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Node, NodeId};

/// How the distance between two nodes of one tree is measured.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceMetric {
    /// Number of edges on the tree path through the lowest common ancestor.
    #[default]
    PathLength,
    /// Absolute difference of preorder indices.
    PreorderGap,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DistanceError {
    #[error("node {0} is not part of this tree")]
    NotInTree(NodeId),
}

/// Distance between nodes `a` and `b` of the tree rooted at `root`.
pub fn ast_distance(root: &Node, a: NodeId, b: NodeId) -> Result<usize, DistanceError> {
    ast_distance_with(root, a, b, DistanceMetric::PathLength)
}

pub fn ast_distance_with(root: &Node, a: NodeId, b: NodeId, metric: DistanceMetric) -> Result<usize, DistanceError> {
    let pa = root.path_to(a).ok_or(DistanceError::NotInTree(a))?;
    let pb = root.path_to(b).ok_or(DistanceError::NotInTree(b))?;
    Ok(match metric {
        DistanceMetric::PathLength => {
            let common = pa.iter().zip(&pb).take_while(|(x, y)| x == y).count();
            pa.len() + pb.len() - 2 * common
        }
        DistanceMetric::PreorderGap => a.abs_diff(b) as usize,
    })
}

/// Distances from `origin` to every node of the tree, in one traversal.
pub fn distances_from(root: &Node, origin: NodeId, metric: DistanceMetric) -> Result<HashMap<NodeId, usize>, DistanceError> {
    let target = root.path_to(origin).ok_or(DistanceError::NotInTree(origin))?;
    let mut out = HashMap::new();
    fn go(n: &Node, path: &mut Vec<usize>, target: &[usize], origin: NodeId, metric: DistanceMetric, out: &mut HashMap<NodeId, usize>) {
        let d = match metric {
            DistanceMetric::PathLength => {
                let common = path.iter().zip(target).take_while(|(x, y)| x == y).count();
                path.len() + target.len() - 2 * common
            }
            DistanceMetric::PreorderGap => n.id.abs_diff(origin) as usize,
        };
        out.insert(n.id, d);
        for (i, c) in n.children.iter().enumerate() {
            path.push(i);
            go(c, path, target, origin, metric, out);
            path.pop();
        }
    }
    go(root, &mut Vec::new(), &target, origin, metric, &mut out);
    Ok(out)
}
