//! Structural comparison modulo harmless syntactic variation.
//!
//! Normalization removes parentheses, rewrites `!(a == b)` to `a != b` (and
//! `!(a != b)` to `a == b`), and puts the operands of `==`, `!=` and integer
//! `+` in a canonical order. Short-circuit operators keep their order. A
//! float cast of an integer literal becomes a float literal.

use std::cmp::Ordering;

use super::{BinOp, Kind, Lit, Node, UnOp};
use crate::lang::printer::print_node;
use crate::lang::LangType;

pub fn normalize(node: &Node) -> Node {
    if node.kind == Kind::Paren {
        return normalize(&node.children[0]);
    }
    let mut out = node.clone();
    out.children = node.children.iter().map(normalize).collect();
    match &out.kind {
        Kind::Cast { ty: LangType::Float } => {
            if let Kind::Literal(Lit::Int(v)) = out.children[0].kind {
                return Node::float(v as f64);
            }
        }
        Kind::Unary { op: UnOp::Not } => {
            if let Kind::Binary { op: inner @ (BinOp::Eq | BinOp::Ne) } = out.children[0].kind {
                let flipped = if inner == BinOp::Eq { BinOp::Ne } else { BinOp::Eq };
                let mut b = out.children.remove(0);
                b.kind = Kind::Binary { op: flipped };
                b.ty = out.ty.take().or(b.ty);
                return b;
            }
        }
        Kind::Binary { op } => {
            let commutes = match op {
                BinOp::Eq | BinOp::Ne => true,
                BinOp::Add => {
                    out.children.iter().all(|c| c.ty == Some(LangType::Int))
                }
                _ => false,
            };
            if commutes && canonical_order(&out.children[0], &out.children[1]) == Ordering::Greater {
                out.children.swap(0, 1);
            }
        }
        _ => {}
    }
    out
}

fn canonical_order(a: &Node, b: &Node) -> Ordering {
    print_node(a).cmp(&print_node(b))
}

/// Equality after normalizing both sides; spans, ids and types are ignored.
pub fn normalize_equal(a: &Node, b: &Node) -> bool {
    normalize(a) == normalize(b)
}
