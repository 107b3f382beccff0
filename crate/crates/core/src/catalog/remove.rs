//! Moving and deleting statements.

use crate::ast::{AstEdit, Kind, Node, NodeId};
use crate::lang::LangType;
use crate::site::Site;

use super::{default_return, dependents_through, Generated, PatternError};

/// A position between statements of a block, given by a neighbour.
struct Slot {
    anchor: NodeId,
    after: bool,
    pos: usize,
}

pub(super) fn move_statement(site: &Site<'_>) -> Result<Vec<Generated>, PatternError> {
    let parent = site.parent().filter(|p| p.kind == Kind::Block).ok_or(PatternError::Precondition("statement is not in a block"))?;
    let idx = parent.children.iter().position(|c| c.id == site.stmt.id).expect("child of parent");
    let body = site.method.children.last().expect("method body");
    let mut slots = Vec::new();
    body.walk(&mut |b| {
        if b.kind != Kind::Block || site.stmt.find(b.id).is_some() {
            return;
        }
        let n = b.children.len();
        for g in 0..=n {
            if b.id == parent.id && (g == idx || g == idx + 1) {
                continue;
            }
            let slot = if g < n {
                Slot { anchor: b.children[g].id, after: false, pos: b.children[g].span.start }
            } else if n > 0 {
                Slot { anchor: b.children[n - 1].id, after: true, pos: b.span.end }
            } else {
                continue;
            };
            slots.push(slot);
        }
    });
    slots.sort_by_key(|s| s.pos);
    let here = site.stmt.span.start;
    let before = slots.iter().filter(|s| s.pos <= here).count();
    let displacement = |k: usize| if k < before { before - k } else { k - before + 1 };
    let mut order: Vec<usize> = (0..slots.len()).collect();
    order.sort_by_key(|&k| (displacement(k), k));
    Ok(order
        .into_iter()
        .map(|k| {
            let s = &slots[k];
            Generated::plain(vec![AstEdit::Move { target: site.stmt.id, anchor: s.anchor, after: s.after }])
        })
        .collect())
}

pub(super) fn delete_statement(site: &Site<'_>) -> Result<Vec<Generated>, PatternError> {
    let mut out = vec![Generated::plain(vec![AstEdit::Delete { target: site.stmt.id }])];
    if let (Some(through), Some(parent)) = (dependents_through(site), site.parent()) {
        let start = parent.children.iter().position(|c| c.id == site.stmt.id).expect("child of parent");
        let end = parent.children.iter().position(|c| c.id == through).expect("sibling");
        let edits = parent.children[start..=end].iter().map(|c| AstEdit::Delete { target: c.id }).collect();
        out.push(Generated::plain(edits));
    }
    Ok(out)
}

pub(super) fn delete_method_body(site: &Site<'_>) -> Result<Vec<Generated>, PatternError> {
    let body = site.method.children.last().expect("method body");
    let stmts = match &site.ret {
        LangType::Void => Vec::new(),
        rt => vec![default_return(rt)],
    };
    let replacement = Node::block(stmts);
    if *body == replacement {
        return Err(PatternError::Precondition("method body is already minimal"));
    }
    Ok(vec![Generated::plain(vec![AstEdit::Update { target: body.id, replacement }])])
}
